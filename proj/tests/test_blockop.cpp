#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crossdiff/blockop.hpp"

using namespace crossdiff;

namespace {

// Random block operator on two sequence components plus a scalar, with
// decaying diagonal tails.
BlockOp<Interval> random_op(std::mt19937& rng, int m) {
    CompLayout lay{m, {false, false, true}};
    Mat<Interval> fin(lay.dim(), lay.dim());
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < lay.dim(); ++i)
        for (int j = 0; j < lay.dim(); ++j) fin(i, j) = Interval(u(rng));
    BlockOp<Interval> op(lay, fin);
    op.tails[0] = {true, Interval(u(rng)), -1};
    op.tails[1] = {true, Interval(u(rng)), -2};
    return op;
}

std::vector<RSeq> random_x(std::mt19937& rng, int m, int extra) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<RSeq> x(3);
    for (int c = 0; c < 2; ++c) {
        x[static_cast<size_t>(c)].parity = Parity::cosine;
        for (int k = 0; k < m + extra; ++k) x[static_cast<size_t>(c)].c.emplace_back(u(rng));
    }
    x[2].parity = Parity::cosine;
    x[2].c.emplace_back(u(rng));
    return x;
}

Interval x_norm(const std::vector<RSeq>& x, const Weight& w) {
    return seq_norm(x[0], w) + seq_norm(x[1], w) + iabs(x[2].at(0));
}

} // namespace

TEST_CASE("theta of a diagonal operator") {
    // B(k,k) = 1/(k+1) on a single cosine component, no tail
    int m = 6;
    CompLayout lay{m, {false}};
    Mat<Interval> fin(m, m);
    for (int k = 0; k < m; ++k) fin(k, k) = Interval(1.0) / Interval(static_cast<double>(k + 1));
    std::vector<Interval> th = theta_norms(fin, lay, Weight(Interval(2.0)));
    CHECK(th[0].contains(1.0)); // column 0 dominates
    CHECK(th[0].hi < 1.0 + 1e-12);
}

TEST_CASE("pure tail rule gives 1/(pi m)") {
    int m = 7;
    CompLayout lay{m, {false}};
    Mat<Interval> fin(m, m); // zero block
    BlockOp<Interval> op(lay, fin);
    op.tails[0] = {true, Interval(-1.0), -1};
    std::vector<Interval> th = theta_norms(op.finite, lay, Weight(Interval(1.5)), &op.tails);
    double expect = 1.0 / (3.14159265358979323846 * m);
    CHECK(th[0].contains(expect));
    CHECK(th[0].width() < 1e-15);
}

TEST_CASE("growing tail rules are rejected") {
    CompLayout lay{3, {false}};
    BlockOp<Interval> op(lay, Mat<Interval>(3, 3));
    op.tails[0] = {true, Interval(1.0), 1};
    CHECK_THROWS_AS(theta_norms(op.finite, lay, Weight(Interval(1.5)), &op.tails), UnboundedTail);
}

TEST_CASE("theta norms dominate the weighted norms of images") {
    std::mt19937 rng(8080);
    Weight w(Interval(1.2));
    for (int trial = 0; trial < 30; ++trial) {
        int m = 5;
        BlockOp<Interval> op = random_op(rng, m);
        std::vector<Interval> th = theta_norms(op.finite, op.layout, w, &op.tails);
        Interval theta_max = imax(imax(th[0], th[1]), th[2]);
        for (int probe = 0; probe < 100; ++probe) {
            std::vector<RSeq> x = random_x(rng, m, 4);
            double xn = x_norm(x, w).hi;
            if (xn == 0.0) continue;
            std::vector<RSeq> y = apply_op(op, x);
            double yn = x_norm(y, w).lo;
            CHECK(yn <= theta_max.hi * xn * (1 + 1e-10));
        }
    }
}

TEST_CASE("column-scaled theta matches the derivative-composed tail") {
    // diagonal tail (pi k)^-2 scaled by pi j on the same component: sup is
    // 1/(pi m)
    int m = 9;
    CompLayout lay{m, {false}};
    Mat<Interval> fin(m, m);
    BlockOp<Interval> op(lay, fin);
    op.tails[0] = {true, Interval(-1.0), -2};
    std::vector<Interval> th = theta_norms(op.finite, lay, Weight(Interval(1.3)), &op.tails, 0);
    CHECK(th[0].contains(1.0 / (3.14159265358979323846 * m)));
}

TEST_CASE("scalar components use plain absolute values") {
    CompLayout lay{2, {false, true}};
    Mat<Interval> fin(3, 3);
    fin(0, 2) = Interval(2.0);  // sequence row, scalar column: column norm
    fin(2, 0) = Interval(3.0);  // scalar row, sequence column: dual norm
    fin(2, 2) = Interval(0.5);
    Weight w(Interval(2.0));
    std::vector<Interval> th = theta_norms(fin, lay, w);
    CHECK(th[1].contains(2.0 + 0.5)); // |column|_nu + |scalar|
    CHECK(th[0].contains(3.0));       // sup_j |b_j| / omega_j at j = 0
}

TEST_CASE("apply matches manual evaluation with tails") {
    CompLayout lay{2, {false}};
    Mat<Interval> fin(2, 2);
    fin(0, 0) = Interval(1.0);
    fin(0, 1) = Interval(2.0);
    fin(1, 1) = Interval(-1.0);
    BlockOp<Interval> op(lay, fin);
    op.tails[0] = {true, Interval(1.0), -1};
    std::vector<RSeq> x(1);
    x[0].parity = Parity::cosine;
    x[0].c = {Interval(1.0), Interval(1.0), Interval(4.0)};
    std::vector<RSeq> y = apply_op(op, x);
    CHECK(y[0].c[0].contains(3.0));
    CHECK(y[0].c[1].contains(-1.0));
    double tail_expect = 4.0 / (2.0 * 3.14159265358979323846);
    CHECK(y[0].c[2].contains(tail_expect));
}
