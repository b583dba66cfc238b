#ifndef CROSSDIFF_SEQ_HPP
#define CROSSDIFF_SEQ_HPP

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "crossdiff/cinterval.hpp"
#include "crossdiff/interval.hpp"

namespace crossdiff {

// Geometric weight nu > 1 of the sequence norm |u0| + 2 sum |uk| nu^k.
struct Weight {
    Interval nu;

    explicit Weight(Interval n) : nu(n) {
        if (!(nu.lo > 1.0)) throw WeightOrder("weight must be > 1");
    }
    explicit Weight(double n) : Weight(Interval(n)) {}
    static Weight from_decimal(const std::string& s) { return Weight(interval_from_decimal(s)); }
    double approx() const { return midpoint(nu); }
};

enum class Parity { cosine, sine };
enum class ConvKind { ast, star, bullet };

// Fourier coefficient sequence, indexed k = 0..len-1, with a parity tag.
// Cosine parity: u(x) = u0 + 2 sum uk cos(k pi x); sine parity:
// u(x) = 2 sum uk sin(k pi x) (entry 0 unused, kept for alignment).
// tail_bound, when set, is a certified nu-norm bound on the unstored tail.
template <class S>
struct Seq {
    std::vector<S> c;
    Parity parity = Parity::cosine;
    std::optional<Interval> tail_bound;

    Seq() = default;
    Seq(std::vector<S> coeffs, Parity p) : c(std::move(coeffs)), parity(p) {}

    int len() const { return static_cast<int>(c.size()); }
    bool finitely_supported() const { return !tail_bound || (tail_bound->lo == 0.0 && tail_bound->hi == 0.0); }
    const S& at(int k) const {
        static const S zero{};
        return (k >= 0 && k < len()) ? c[static_cast<size_t>(k)] : zero;
    }
};

using RSeq = Seq<Interval>;
using CSeq = Seq<CInterval>;

inline RSeq delta0(const Interval& value) { return RSeq({value}, Parity::cosine); }

inline CSeq promote(const RSeq& u) {
    CSeq r;
    r.parity = u.parity;
    r.tail_bound = u.tail_bound;
    r.c.reserve(u.c.size());
    for (const auto& x : u.c) r.c.emplace_back(x);
    return r;
}

template <class S>
Seq<S> operator+(const Seq<S>& a, const Seq<S>& b) {
    if (a.parity != b.parity) throw ParityMismatch("adding sequences of different parity");
    Seq<S> r;
    r.parity = a.parity;
    r.c.resize(static_cast<size_t>(std::max(a.len(), b.len())));
    for (int k = 0; k < r.len(); ++k) r.c[static_cast<size_t>(k)] = a.at(k) + b.at(k);
    if (a.tail_bound || b.tail_bound)
        r.tail_bound = (a.tail_bound ? *a.tail_bound : Interval(0.0)) + (b.tail_bound ? *b.tail_bound : Interval(0.0));
    return r;
}

template <class S>
Seq<S> operator-(const Seq<S>& a, const Seq<S>& b) {
    if (a.parity != b.parity) throw ParityMismatch("subtracting sequences of different parity");
    Seq<S> r;
    r.parity = a.parity;
    r.c.resize(static_cast<size_t>(std::max(a.len(), b.len())));
    for (int k = 0; k < r.len(); ++k) r.c[static_cast<size_t>(k)] = a.at(k) - b.at(k);
    if (a.tail_bound || b.tail_bound)
        r.tail_bound = (a.tail_bound ? *a.tail_bound : Interval(0.0)) + (b.tail_bound ? *b.tail_bound : Interval(0.0));
    return r;
}

inline RSeq scale(const Interval& f, const RSeq& u) {
    RSeq r = u;
    for (auto& x : r.c) x = f * x;
    if (r.tail_bound) r.tail_bound = iabs(f) * *r.tail_bound;
    return r;
}

inline CSeq scale(const Interval& f, const CSeq& u) {
    CSeq r = u;
    for (auto& x : r.c) x = f * x;
    if (r.tail_bound) r.tail_bound = iabs(f) * *r.tail_bound;
    return r;
}

inline CSeq scale(const CInterval& f, const CSeq& u) {
    CSeq r = u;
    for (auto& x : r.c) x = f * x;
    if (r.tail_bound) r.tail_bound = iabs(f) * *r.tail_bound;
    return r;
}

// Table of nu^k enclosures for k = 0..len-1.
std::vector<Interval> weight_powers(const Weight& w, int len);

// Norm weights omega_0 = 1, omega_k = 2 nu^k.
std::vector<Interval> norm_weights(const Weight& w, int len);

// Enclosure of |u0| + 2 sum_{k>=1} |uk| nu^k (+ tail bound if present).
template <class S>
Interval seq_norm(const Seq<S>& u, const Weight& w) {
    Interval acc(0.0);
    Interval p(1.0);
    for (int k = 0; k < u.len(); ++k) {
        Interval a = iabs(u.c[static_cast<size_t>(k)]);
        acc += (k == 0) ? a : Interval(2.0) * a * p;
        if (k + 1 < u.len()) p *= w.nu;
    }
    if (u.tail_bound) acc += *u.tail_bound;
    return acc;
}

namespace detail {
inline int sgn(long k) { return k > 0 ? 1 : (k < 0 ? -1 : 0); }
}

// The three convolution products. ast: cosine*cosine -> cosine;
// star: sine*cosine -> sine; bullet: sine*sine -> cosine. Index folding by
// explicit enumeration over the support rectangle.
template <class S>
Seq<S> conv(ConvKind kind, const Seq<S>& u, const Seq<S>& v) {
    if (!u.finitely_supported() || !v.finitely_supported())
        throw UnboundedSupport("convolution requires finitely supported sequences");
    switch (kind) {
        case ConvKind::ast:
            if (u.parity != Parity::cosine || v.parity != Parity::cosine)
                throw ParityMismatch("ast expects cosine*cosine");
            break;
        case ConvKind::star:
            if (u.parity != Parity::sine || v.parity != Parity::cosine)
                throw ParityMismatch("star expects sine*cosine");
            break;
        case ConvKind::bullet:
            if (u.parity != Parity::sine || v.parity != Parity::sine)
                throw ParityMismatch("bullet expects sine*sine");
            break;
    }
    Seq<S> r;
    r.parity = (kind == ConvKind::star) ? Parity::sine : Parity::cosine;
    if (u.len() == 0 || v.len() == 0) return r;
    int lu = u.len(), lv = v.len();
    r.c.resize(static_cast<size_t>(lu + lv - 1));
    for (int k = 0; k < lu + lv - 1; ++k) {
        if (kind == ConvKind::star && k == 0) continue; // (k1,-k1) pairs cancel exactly
        S acc{};
        for (long k1 = -(lu - 1); k1 <= lu - 1; ++k1) {
            long k2 = k - k1;
            if (k2 <= -lv || k2 >= lv) continue;
            int s = 1;
            if (kind == ConvKind::star) s = detail::sgn(k1);
            else if (kind == ConvKind::bullet) s = detail::sgn(k1) * detail::sgn(k2);
            if (s == 0) continue;
            S term = u.c[static_cast<size_t>(std::labs(k1))] * v.c[static_cast<size_t>(std::labs(k2))];
            if (s < 0) acc -= term;
            else acc += term;
        }
        r.c[static_cast<size_t>(k)] = acc;
    }
    return r;
}

// Per-mode bound on a convolution against the unstored tail of a unit-norm
// partner: encloses sup_{|l| >= m} |u_{|l-k|}| / nu^{|l|}.
template <class S>
Interval tail_product_bound(const Seq<S>& u, int m, int k, const Weight& w) {
    if (!u.finitely_supported()) throw UnboundedSupport("tail bound requires finite support");
    if (m < 1) throw DomainError("tail bound requires m >= 1");
    int L = u.len();
    Interval best(0.0);
    Interval inv_nu = Interval(1.0) / w.nu;
    // positive l in [m, k+L-1]
    if (k + L - 1 >= m) {
        Interval q = ipow(inv_nu, m);
        for (int l = m; l <= k + L - 1; ++l) {
            int idx = std::abs(l - k);
            if (idx < L) best = imax(best, iabs(u.at(idx)) * q);
            q *= inv_nu;
        }
    }
    // negative l in [-(L-1-k), -m]
    if (L - 1 - k >= m) {
        Interval q = ipow(inv_nu, m);
        for (int labs = m; labs <= L - 1 - k; ++labs) {
            best = imax(best, iabs(u.at(k + labs)) * q);
            q *= inv_nu;
        }
    }
    return best;
}

// Coefficient-wise pi*k scaling (Fourier derivative up to sign); flips parity.
template <class S>
Seq<S> differentiate(const Seq<S>& u) {
    Seq<S> r = u;
    r.parity = (u.parity == Parity::cosine) ? Parity::sine : Parity::cosine;
    Interval pi = ipi();
    for (int k = 0; k < r.len(); ++k) r.c[static_cast<size_t>(k)] = (pi * Interval(static_cast<double>(k))) * u.c[static_cast<size_t>(k)];
    if (r.tail_bound && !(r.tail_bound->lo == 0.0 && r.tail_bound->hi == 0.0))
        throw UnboundedSupport("differentiate requires finite support");
    return r;
}

// Enclosure of sup_{k>=1} k^order (gamma/nu)^k, the norm cost of one or two
// derivatives when dropping from weight nu to gamma (1 < gamma < nu).
Interval upsilon(int order, const Weight& gamma, const Weight& nu);

// v(0) = u0 + 2 sum uk for a cosine sequence.
template <class S>
S eval_at_zero(const Seq<S>& u) {
    S acc{};
    for (int k = 0; k < u.len(); ++k) {
        S t = u.c[static_cast<size_t>(k)];
        acc += (k == 0) ? t : t + t;
    }
    return acc;
}

} // namespace crossdiff

#endif
