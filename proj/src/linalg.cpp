#include "crossdiff/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace crossdiff {

int worker_count() {
    if (const char* env = std::getenv("CROSSDIFF_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

namespace {

template <class F>
void parallel_rows(int rows, F&& body) {
    int workers = std::min(worker_count(), rows > 0 ? rows : 1);
    if (workers <= 1) {
        for (int i = 0; i < rows; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < rows; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// point * interval: two directed products instead of four
inline Interval mul_pi(double a, const Interval& b) {
    if (a >= 0.0) return {rnd::mul_down(a, b.lo), rnd::mul_up(a, b.hi)};
    return {rnd::mul_down(a, b.hi), rnd::mul_up(a, b.lo)};
}

} // namespace

IMatrix matmul_point_left(const Mat<double>& a, const IMatrix& b) {
    if (a.cols != b.rows) throw DimensionMismatch("matmul dimension mismatch");
    IMatrix c(a.rows, b.cols);
    parallel_rows(a.rows, [&](int i) {
        Interval* crow = &c.a[static_cast<size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            const Interval* brow = &b.a[static_cast<size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += mul_pi(aik, brow[j]);
        }
    });
    return c;
}

CIMatrix matmul_point_left(const Mat<std::complex<double>>& a, const CIMatrix& b) {
    if (a.cols != b.rows) throw DimensionMismatch("matmul dimension mismatch");
    CIMatrix c(a.rows, b.cols);
    parallel_rows(a.rows, [&](int i) {
        CInterval* crow = &c.a[static_cast<size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            std::complex<double> aik = a(i, k);
            double ar = aik.real(), ai = aik.imag();
            if (ar == 0.0 && ai == 0.0) continue;
            const CInterval* brow = &b.a[static_cast<size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) {
                const CInterval& z = brow[j];
                if (z.re.lo == 0.0 && z.re.hi == 0.0 && z.im.lo == 0.0 && z.im.hi == 0.0) continue;
                Interval re = mul_pi(ar, z.re) - mul_pi(ai, z.im);
                Interval im = mul_pi(ar, z.im) + mul_pi(ai, z.re);
                crow[j] += CInterval{re, im};
            }
        }
    });
    return c;
}

IMatrix matmul(const IMatrix& a, const IMatrix& b) {
    if (a.cols != b.rows) throw DimensionMismatch("matmul dimension mismatch");
    IMatrix c(a.rows, b.cols);
    parallel_rows(a.rows, [&](int i) {
        Interval* crow = &c.a[static_cast<size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            const Interval& aik = a(i, k);
            if (aik.lo == 0.0 && aik.hi == 0.0) continue;
            const Interval* brow = &b.a[static_cast<size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    });
    return c;
}

Mat<double> midpoint(const IMatrix& m) {
    Mat<double> r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = midpoint(m.a[i]);
    return r;
}

Mat<std::complex<double>> midpoint(const CIMatrix& m) {
    Mat<std::complex<double>> r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = midpoint(m.a[i]);
    return r;
}

IMatrix promote(const Mat<double>& m) {
    IMatrix r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = Interval(m.a[i]);
    return r;
}

CIMatrix promote(const Mat<std::complex<double>>& m) {
    CIMatrix r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = CInterval(m.a[i]);
    return r;
}

} // namespace crossdiff
