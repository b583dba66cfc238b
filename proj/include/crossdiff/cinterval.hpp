#ifndef CROSSDIFF_CINTERVAL_HPP
#define CROSSDIFF_CINTERVAL_HPP

#include <complex>

#include "crossdiff/interval.hpp"

namespace crossdiff {

// Rectangular complex interval: an axis-aligned box re x im. Closed under
// the operations needed here (add, sub, multiply); containment holds
// componentwise.
struct CInterval {
    Interval re;
    Interval im;

    CInterval() = default;
    explicit CInterval(double x) : re(x), im(0.0) {}
    explicit CInterval(const Interval& r) : re(r), im(0.0) {}
    CInterval(const Interval& r, const Interval& i) : re(r), im(i) {}
    explicit CInterval(std::complex<double> z) : re(z.real()), im(z.imag()) {}

    bool finite() const { return re.finite() && im.finite(); }
    bool is_point() const { return re.is_point() && im.is_point(); }
    bool contains(std::complex<double> z) const { return re.contains(z.real()) && im.contains(z.imag()); }
};

inline CInterval operator+(const CInterval& a, const CInterval& b) { return {a.re + b.re, a.im + b.im}; }
inline CInterval operator-(const CInterval& a, const CInterval& b) { return {a.re - b.re, a.im - b.im}; }
inline CInterval operator-(const CInterval& a) { return {-a.re, -a.im}; }
inline CInterval operator*(const CInterval& a, const CInterval& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CInterval operator*(const Interval& a, const CInterval& b) { return {a * b.re, a * b.im}; }
inline CInterval operator*(const CInterval& a, const Interval& b) { return {a.re * b, a.im * b}; }
inline CInterval& operator+=(CInterval& a, const CInterval& b) { a = a + b; return a; }
inline CInterval& operator-=(CInterval& a, const CInterval& b) { a = a - b; return a; }
inline CInterval conj(const CInterval& a) { return {a.re, -a.im}; }

// Enclosure of {|z| : z in a}.
inline Interval iabs(const CInterval& a) { return isqrt(sqr(a.re) + sqr(a.im)); }

inline std::complex<double> midpoint(const CInterval& a) { return {midpoint(a.re), midpoint(a.im)}; }

} // namespace crossdiff

#endif
