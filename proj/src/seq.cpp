#include "crossdiff/seq.hpp"

namespace crossdiff {

std::vector<Interval> weight_powers(const Weight& w, int len) {
    std::vector<Interval> p(static_cast<size_t>(len));
    if (len == 0) return p;
    p[0] = Interval(1.0);
    for (int k = 1; k < len; ++k) p[static_cast<size_t>(k)] = p[static_cast<size_t>(k - 1)] * w.nu;
    return p;
}

std::vector<Interval> norm_weights(const Weight& w, int len) {
    std::vector<Interval> p = weight_powers(w, len);
    for (int k = 1; k < len; ++k) p[static_cast<size_t>(k)] = Interval(2.0) * p[static_cast<size_t>(k)];
    return p;
}

namespace {

// Tightest representable enclosure of e.
Interval ie() {
    double lo = 0x1.5bf0a8b145769p+1; // largest double below e
    return {lo, rnd::next_up(lo)};
}

// ln on (1, 8] via the atanh series with explicit remainder.
Interval ilog_gt1(const Interval& x) {
    if (!(x.lo > 1.0) || x.hi > 8.0) throw DomainError("ilog_gt1 domain");
    Interval t = (x - Interval(1.0)) / (x + Interval(1.0));
    Interval t2 = sqr(t);
    constexpr int kTerms = 160;
    Interval sum(0.0);
    Interval tp = t;
    for (int i = 0; i < kTerms; ++i) {
        sum += tp / Interval(static_cast<double>(2 * i + 1));
        tp *= t2;
    }
    // remainder: sum_{i>N} t^(2i+1)/(2i+1) <= t^(2N+3)/((2N+3)(1-t^2))
    Interval rem = tp * t / (Interval(static_cast<double>(2 * kTerms + 1)) * (Interval(1.0) - t2));
    double rpad = iabs(rem).hi;
    Interval s2 = Interval(2.0) * sum;
    return {rnd::sub_down(s2.lo, 2.0 * rpad), rnd::add_up(s2.hi, 2.0 * rpad)};
}

} // namespace

Interval upsilon(int order, const Weight& gamma, const Weight& nu) {
    if (order != 1 && order != 2) throw DomainError("upsilon order must be 1 or 2");
    if (!(gamma.nu.hi < nu.nu.lo)) throw WeightOrder("upsilon requires gamma < nu");
    Interval q = gamma.nu / nu.nu;            // in (0,1)
    Interval einv = Interval(1.0) / ie();
    Interval thresh = (order == 1) ? einv : sqr(einv);
    if (q.hi < thresh.lo) return q;           // max of k^order q^k over k>=1 is at k=1
    // otherwise the continuous maximum bounds the supremum
    Interval L = ilog_gt1(nu.nu / gamma.nu);  // ln(1/q)
    if (order == 1) return einv / L;
    return sqr(Interval(2.0) * einv / L);
}

} // namespace crossdiff
