#ifndef CROSSDIFF_BLOCKOP_HPP
#define CROSSDIFF_BLOCKOP_HPP

#include <vector>

#include "crossdiff/linalg.hpp"
#include "crossdiff/seq.hpp"

namespace crossdiff {

// Component layout of a block operator on a product of sequence spaces
// (each truncated at m) and scalar factors.
struct CompLayout {
    int m = 0;
    std::vector<bool> scalar;

    int count() const { return static_cast<int>(scalar.size()); }
    int size(int i) const { return scalar[static_cast<size_t>(i)] ? 1 : m; }
    int offset(int i) const {
        int off = 0;
        for (int c = 0; c < i; ++c) off += size(c);
        return off;
    }
    int dim() const { return offset(count()); }
};

// Diagonal tail rule tail(k) = coef * (pi k)^power for modes k >= m.
struct TailRule {
    bool present = false;
    Interval coef;
    int power = 0;
};

inline Interval pi_k_pow(int k, int power) {
    Interval base = ipi() * Interval(static_cast<double>(k));
    if (power >= 0) return ipow(base, power);
    return Interval(1.0) / ipow(base, -power);
}

inline Interval tail_value(const TailRule& t, int k) {
    if (!t.present) return Interval(0.0);
    return t.coef * pi_k_pow(k, t.power);
}

// sup_{j >= m} |tail(j)|; requires a non-growing rule.
inline Interval tail_sup(const TailRule& t, int m) {
    if (!t.present) return Interval(0.0);
    if (t.power > 0) throw UnboundedTail("tail rule grows with k");
    return iabs(t.coef) * pi_k_pow(m, t.power);
}

// Linear operator stored as a dense finite block plus per-component diagonal
// tail rules (off-diagonal tails are zero by construction).
template <class S>
struct BlockOp {
    CompLayout layout;
    Mat<S> finite;
    std::vector<TailRule> tails; // per component

    BlockOp() = default;
    BlockOp(CompLayout lay, Mat<S> fin)
        : layout(lay), finite(std::move(fin)), tails(static_cast<size_t>(lay.count())) {}
};

template <class S>
Mat<Interval> entrywise_abs(const Mat<S>& m) {
    Mat<Interval> r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = iabs(m.a[i]);
    return r;
}

// Weighted column-sum operator norms. For each column component i this
// returns Theta^(i) = sum over row components r of the block norm
// sup_j omega_j^{-1} sum_k omega_k |B(k,j)|, the diagonal blocks picking up
// their tail supremum. col_scale_pik scales column j of the scaled component
// by pi*j (used for operators composed with the derivative on that slot).
template <class S>
std::vector<Interval> theta_norms(const Mat<S>& finite, const CompLayout& lay, const Weight& w,
                                  const std::vector<TailRule>* tails = nullptr,
                                  int col_scale_pik_comp = -1) {
    if (finite.rows != lay.dim() || finite.cols != lay.dim())
        throw DimensionMismatch("theta_norms: matrix does not match layout");
    std::vector<Interval> omega = norm_weights(w, lay.m);
    Interval pi = ipi();
    std::vector<Interval> theta(static_cast<size_t>(lay.count()), Interval(0.0));
    for (int ci = 0; ci < lay.count(); ++ci) {
        for (int ri = 0; ri < lay.count(); ++ri) {
            Interval block_norm(0.0);
            bool any = false;
            for (int j = 0; j < lay.size(ci); ++j) {
                Interval colsum(0.0);
                int jg = lay.offset(ci) + j;
                for (int k = 0; k < lay.size(ri); ++k) {
                    int kg = lay.offset(ri) + k;
                    Interval wk = lay.scalar[static_cast<size_t>(ri)] ? Interval(1.0) : omega[static_cast<size_t>(k)];
                    colsum += wk * iabs(finite(kg, jg));
                }
                Interval wj = lay.scalar[static_cast<size_t>(ci)] ? Interval(1.0) : omega[static_cast<size_t>(j)];
                colsum = colsum / wj;
                if (col_scale_pik_comp >= 0) {
                    if (ci != col_scale_pik_comp) { colsum = Interval(0.0); }
                    else colsum = colsum * (pi * Interval(static_cast<double>(j)));
                }
                block_norm = any ? imax(block_norm, colsum) : colsum;
                any = true;
            }
            if (tails && ri == ci && !lay.scalar[static_cast<size_t>(ci)]) {
                const TailRule& t = (*tails)[static_cast<size_t>(ci)];
                if (t.present) {
                    TailRule teff = t;
                    if (col_scale_pik_comp >= 0) {
                        if (ci == col_scale_pik_comp) teff.power = t.power + 1;
                        else teff.present = false;
                    }
                    if (teff.present) block_norm = imax(block_norm, tail_sup(teff, lay.m));
                }
            }
            theta[static_cast<size_t>(ci)] += block_norm;
        }
    }
    return theta;
}

// Apply the operator. Component entries shorter than m are zero padded;
// entries beyond m (on the input) go through the diagonal tail rule.
template <class S>
std::vector<Seq<S>> apply_op(const BlockOp<S>& B, const std::vector<Seq<S>>& x) {
    const CompLayout& lay = B.layout;
    if (static_cast<int>(x.size()) != lay.count()) throw DimensionMismatch("apply: component count");
    std::vector<S> hat(static_cast<size_t>(lay.dim()));
    for (int c = 0; c < lay.count(); ++c)
        for (int k = 0; k < lay.size(c); ++k) hat[static_cast<size_t>(lay.offset(c) + k)] = x[static_cast<size_t>(c)].at(k);
    std::vector<S> yhat = enclose_matvec(B.finite, hat);
    std::vector<Seq<S>> y(static_cast<size_t>(lay.count()));
    for (int c = 0; c < lay.count(); ++c) {
        const Seq<S>& xc = x[static_cast<size_t>(c)];
        int out_len = lay.scalar[static_cast<size_t>(c)] ? 1 : std::max(lay.m, xc.len());
        y[static_cast<size_t>(c)].parity = xc.parity;
        y[static_cast<size_t>(c)].c.assign(static_cast<size_t>(out_len), S{});
        for (int k = 0; k < lay.size(c); ++k)
            y[static_cast<size_t>(c)].c[static_cast<size_t>(k)] = yhat[static_cast<size_t>(lay.offset(c) + k)];
        if (!lay.scalar[static_cast<size_t>(c)]) {
            const TailRule& t = B.tails[static_cast<size_t>(c)];
            for (int k = lay.m; k < xc.len(); ++k) {
                S scaled = tail_value(t, k) * xc.c[static_cast<size_t>(k)];
                y[static_cast<size_t>(c)].c[static_cast<size_t>(k)] = scaled;
            }
        }
    }
    return y;
}

} // namespace crossdiff

#endif
