#ifndef CROSSDIFF_INTERVAL_HPP
#define CROSSDIFF_INTERVAL_HPP

#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "crossdiff/errors.hpp"

namespace crossdiff {

namespace rnd {

// Next representable double toward +inf. A round-to-nearest result of -inf
// means the exact value is <= -DBL_MAX, so -DBL_MAX is a valid upper bound;
// +inf stays +inf (it is the upper bound, and marks overflow for tainting).
inline double next_up(double x) {
    if (std::isnan(x)) return x;
    if (x == std::numeric_limits<double>::infinity()) return x;
    if (x == -std::numeric_limits<double>::infinity()) return -DBL_MAX;
    if (x == 0.0) return std::numeric_limits<double>::denorm_min();
    std::uint64_t b = std::bit_cast<std::uint64_t>(x);
    b += (b >> 63) ? -1ull : 1ull;
    return std::bit_cast<double>(b);
}

inline double next_down(double x) {
    if (std::isnan(x)) return x;
    if (x == -std::numeric_limits<double>::infinity()) return x;
    if (x == std::numeric_limits<double>::infinity()) return DBL_MAX;
    if (x == 0.0) return -std::numeric_limits<double>::denorm_min();
    std::uint64_t b = std::bit_cast<std::uint64_t>(x);
    b += (b >> 63) ? 1ull : -1ull;
    return std::bit_cast<double>(b);
}

// Round-to-nearest overflow to +-inf means the exact value lies beyond
// DBL_MAX in that direction, so DBL_MAX (resp. -DBL_MAX) is still a valid
// bound from the other side.
inline double lo_bound(double rn_result, double err_sign) {
    if (rn_result == std::numeric_limits<double>::infinity()) return DBL_MAX;
    if (err_sign < 0.0 || std::isnan(err_sign)) return next_down(rn_result);
    return rn_result;
}

inline double hi_bound(double rn_result, double err_sign) {
    if (rn_result == -std::numeric_limits<double>::infinity()) return -DBL_MAX;
    if (err_sign > 0.0 || std::isnan(err_sign)) return next_up(rn_result);
    return rn_result;
}

// TwoSum error term; exact when no intermediate overflow occurs.
inline double sum_err(double a, double b, double s) {
    if (!std::isfinite(s) || std::fabs(s) > 1e306) return std::numeric_limits<double>::quiet_NaN();
    double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

// fma-based product error; reliable only for normal finite products.
inline double prod_err(double a, double b, double p) {
    if (!std::isfinite(p)) return std::numeric_limits<double>::quiet_NaN();
    if (p == 0.0) return (a == 0.0 || b == 0.0) ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    if (std::fabs(p) < DBL_MIN) return std::numeric_limits<double>::quiet_NaN();
    return std::fma(a, b, -p);
}

inline double add_down(double a, double b) { double s = a + b; return lo_bound(s, sum_err(a, b, s)); }
inline double add_up(double a, double b)   { double s = a + b; return hi_bound(s, sum_err(a, b, s)); }
inline double sub_down(double a, double b) { double s = a - b; return lo_bound(s, sum_err(a, -b, s)); }
inline double sub_up(double a, double b)   { double s = a - b; return hi_bound(s, sum_err(a, -b, s)); }

// 0 * inf in endpoint products is taken as 0: the zero factor is exact,
// so the exact product over the set is 0 regardless of saturation.
inline double mul_down(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    return lo_bound(p, prod_err(a, b, p));
}
inline double mul_up(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    return hi_bound(p, prod_err(a, b, p));
}

// sign(exact - q) = -sign(r)*sign(b) with r = q*b - a.
inline double div_down(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q) || (std::fabs(q) < DBL_MIN && q != 0.0) || (q == 0.0 && a != 0.0))
        return q == std::numeric_limits<double>::infinity() ? DBL_MAX : next_down(q);
    double r = std::fma(q, b, -a);
    if (std::isnan(r)) return next_down(q);
    double es = (b > 0.0) ? -r : r;
    return lo_bound(q, es);
}
inline double div_up(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q) || (std::fabs(q) < DBL_MIN && q != 0.0) || (q == 0.0 && a != 0.0))
        return q == -std::numeric_limits<double>::infinity() ? -DBL_MAX : next_up(q);
    double r = std::fma(q, b, -a);
    if (std::isnan(r)) return next_up(q);
    double es = (b > 0.0) ? -r : r;
    return hi_bound(q, es);
}

// std::sqrt is correctly rounded per IEEE 754; the fma residual detects
// exact roots so that e.g. sqrt(0) and sqrt(4) stay points.
inline double sqrt_down(double x) {
    double s = std::sqrt(x);
    if (!std::isfinite(s) || (s != 0.0 && std::fabs(s) < DBL_MIN)) return next_down(s);
    double r = std::fma(s, s, -x);
    return r > 0.0 ? next_down(s) : s;
}
inline double sqrt_up(double x) {
    double s = std::sqrt(x);
    if (!std::isfinite(s) || (s != 0.0 && std::fabs(s) < DBL_MIN)) return next_up(s);
    double r = std::fma(s, s, -x);
    return r < 0.0 ? next_up(s) : s;
}

} // namespace rnd

// Closed real interval [lo,hi] with outward-rounded arithmetic. Every
// operation encloses the exact result for any selection of points from the
// operands. Values are immutable in practice (ops return new intervals) and
// no operation touches the process rounding mode.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    explicit Interval(double x) : lo(x), hi(x) {}
    Interval(double l, double h) : lo(l), hi(h) {}

    static Interval entire() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }

    bool is_point() const { return lo == hi; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    double width() const { return rnd::sub_up(hi, lo); }
    // max |x| over the interval
    double mag() const { return std::fmax(std::fabs(lo), std::fabs(hi)); }
    // min |x| over the interval
    double mig() const { return contains_zero() ? 0.0 : std::fmin(std::fabs(lo), std::fabs(hi)); }
};

namespace detail {
inline Interval sanitize(Interval r) {
    if (std::isnan(r.lo) || std::isnan(r.hi) || r.lo > r.hi) return Interval::entire();
    return r;
}
} // namespace detail

inline Interval operator+(const Interval& a, const Interval& b) {
    return detail::sanitize({rnd::add_down(a.lo, b.lo), rnd::add_up(a.hi, b.hi)});
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return detail::sanitize({rnd::sub_down(a.lo, b.hi), rnd::sub_up(a.hi, b.lo)});
}
inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
    double l1 = rnd::mul_down(a.lo, b.lo), l2 = rnd::mul_down(a.lo, b.hi);
    double l3 = rnd::mul_down(a.hi, b.lo), l4 = rnd::mul_down(a.hi, b.hi);
    double u1 = rnd::mul_up(a.lo, b.lo), u2 = rnd::mul_up(a.lo, b.hi);
    double u3 = rnd::mul_up(a.hi, b.lo), u4 = rnd::mul_up(a.hi, b.hi);
    return detail::sanitize({std::fmin(std::fmin(l1, l2), std::fmin(l3, l4)),
                             std::fmax(std::fmax(u1, u2), std::fmax(u3, u4))});
}

inline Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DivisionByZeroInterval("interval division by an interval containing 0");
    double l1 = rnd::div_down(a.lo, b.lo), l2 = rnd::div_down(a.lo, b.hi);
    double l3 = rnd::div_down(a.hi, b.lo), l4 = rnd::div_down(a.hi, b.hi);
    double u1 = rnd::div_up(a.lo, b.lo), u2 = rnd::div_up(a.lo, b.hi);
    double u3 = rnd::div_up(a.hi, b.lo), u4 = rnd::div_up(a.hi, b.hi);
    return detail::sanitize({std::fmin(std::fmin(l1, l2), std::fmin(l3, l4)),
                             std::fmax(std::fmax(u1, u2), std::fmax(u3, u4))});
}

inline Interval& operator+=(Interval& a, const Interval& b) { a = a + b; return a; }
inline Interval& operator-=(Interval& a, const Interval& b) { a = a - b; return a; }
inline Interval& operator*=(Interval& a, const Interval& b) { a = a * b; return a; }

inline Interval operator*(double a, const Interval& b) { return Interval(a) * b; }
inline Interval operator*(const Interval& a, double b) { return a * Interval(b); }
inline Interval operator+(const Interval& a, double b) { return a + Interval(b); }
inline Interval operator-(double a, const Interval& b) { return Interval(a) - b; }
inline Interval operator/(const Interval& a, double b) { return a / Interval(b); }
inline Interval operator/(double a, const Interval& b) { return Interval(a) / b; }

// Enclosure of {|x| : x in a}.
inline Interval iabs(const Interval& a) {
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return {-a.hi, -a.lo};
    return {0.0, std::fmax(-a.lo, a.hi)};
}

// Enclosure of {x^2 : x in a}; tighter than a*a when a straddles 0.
inline Interval sqr(const Interval& a) {
    Interval m = iabs(a);
    return detail::sanitize({rnd::mul_down(m.lo, m.lo), rnd::mul_up(m.hi, m.hi)});
}

inline Interval isqrt(const Interval& a) {
    if (a.hi < 0.0) throw DomainError("isqrt of a negative interval");
    double lo = a.lo < 0.0 ? 0.0 : a.lo;
    return {std::fmax(0.0, rnd::sqrt_down(lo)), rnd::sqrt_up(a.hi)};
}

inline Interval imax(const Interval& a, const Interval& b) {
    return {std::fmax(a.lo, b.lo), std::fmax(a.hi, b.hi)};
}
inline Interval imin(const Interval& a, const Interval& b) {
    return {std::fmin(a.lo, b.lo), std::fmin(a.hi, b.hi)};
}
inline Interval hull(const Interval& a, const Interval& b) {
    return {std::fmin(a.lo, b.lo), std::fmax(a.hi, b.hi)};
}

// A point inside the interval, for handing values to nonrigorous code.
inline double midpoint(const Interval& a) {
    if (a.lo == a.hi) return a.lo;
    double m = a.lo + 0.5 * (a.hi - a.lo);
    if (!std::isfinite(m)) m = 0.5 * a.lo + 0.5 * a.hi;
    if (m < a.lo) m = a.lo;
    if (m > a.hi) m = a.hi;
    return m;
}

// Tightest representable enclosure of pi.
inline Interval ipi() {
    double lo = 0x1.921fb54442d18p+1; // largest double below pi
    return {lo, rnd::next_up(lo)};
}

// Enclosure of an integer power nu^k, k >= 0, by repeated multiplication.
inline Interval ipow(const Interval& base, long k) {
    Interval r(1.0);
    for (long i = 0; i < k; ++i) r *= base;
    return r;
}

// Enclosure of cos(pi*q) for an exactly-given double q. The reduction to
// [0,1/2] uses only exact operations (fmod by 2, reflections across 1 and
// 1/2 are exact by Sterbenz), then a Taylor series with explicit remainder
// on [0, pi/2].
Interval cos_pi(double q);

// Outward enclosure of a decimal literal such as "0.005" or "-1.25e-3".
// Exact-valued literals (e.g. "5", "0.25") produce point intervals.
Interval interval_from_decimal(const std::string& text);

// 17-significant-digit decimal rendering; round-trips through strtod.
std::string double_to_string(double x);
std::string interval_to_string(const Interval& a); // "[lo,hi]" with 17 digits

bool parse_double_exact(const std::string& text, double& out);

} // namespace crossdiff

#endif
