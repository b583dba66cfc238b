#include "crossdiff/interval.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace crossdiff {

namespace {

// Taylor coefficients 1/(2i)! as intervals, built by exact small-integer
// divisions so that no factorial has to be represented in binary64.
constexpr int kCosTerms = 13;

const std::array<Interval, kCosTerms>& cos_coeffs() {
    static const std::array<Interval, kCosTerms> table = [] {
        std::array<Interval, kCosTerms> t{};
        t[0] = Interval(1.0);
        for (int i = 1; i < kCosTerms; ++i)
            t[i] = t[i - 1] / Interval(static_cast<double>((2 * i - 1) * (2 * i)));
        return t;
    }();
    return table;
}

// cos on [0, pi/2] via alternating Taylor series; the remainder is bounded
// by the first omitted term.
Interval cos_core(const Interval& y) {
    const auto& c = cos_coeffs();
    Interval y2 = sqr(y);
    Interval s = c[kCosTerms - 1];
    for (int i = kCosTerms - 2; i >= 0; --i) s = c[i] - y2 * s;
    // first omitted term: y^(2K)/(2K)!
    Interval rem = c[kCosTerms - 1] * ipow(y2, kCosTerms - 1) * y2 / Interval((2 * kCosTerms - 1) * (2 * kCosTerms));
    double r = iabs(rem).hi;
    Interval out{rnd::sub_down(s.lo, r), rnd::add_up(s.hi, r)};
    return imin(imax(out, Interval(-1.0)), Interval(1.0));
}

} // namespace

Interval cos_pi(double q) {
    if (!std::isfinite(q)) return {-1.0, 1.0};
    q = std::fabs(q);                 // cos(-x) = cos(x)
    q = std::fmod(q, 2.0);            // exact remainder
    bool neg = false;
    if (q > 1.0) q = 2.0 - q;         // exact (Sterbenz), cos(2pi - t) = cos(t)
    if (q > 0.5) { q = 1.0 - q; neg = true; }  // exact, cos(pi - t) = -cos(t)
    Interval y = ipi() * Interval(q);
    Interval c = cos_core(y);
    return neg ? -c : c;
}

std::string double_to_string(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string interval_to_string(const Interval& a) {
    return "[" + double_to_string(a.lo) + "," + double_to_string(a.hi) + "]";
}

bool parse_double_exact(const std::string& text, double& out) {
    const char* s = text.c_str();
    char* end = nullptr;
    out = std::strtod(s, &end);
    return end != s && *end == '\0';
}

namespace {

// Enclosure of 10^k for k >= 0; exact for k <= 22.
Interval pow10_pos(long k) {
    Interval r(1.0);
    while (k > 22) { r *= Interval(1e22); k -= 22; }
    double chunk = 1.0;
    for (long i = 0; i < k; ++i) chunk *= 10.0; // exact, k <= 22
    return r * Interval(chunk);
}

Interval scale_pow10(const Interval& mant, long e) {
    if (e >= 0) return mant * pow10_pos(e);
    return mant / pow10_pos(-e);
}

} // namespace

Interval interval_from_decimal(const std::string& text) {
    const char* p = text.c_str();
    bool negative = false;
    if (*p == '+' || *p == '-') { negative = (*p == '-'); ++p; }

    // Mantissa digits accumulated exactly; a leading block of up to 15 digits
    // is exact in binary64, the remainder is carried as a second summand.
    unsigned long long head = 0, tail = 0;
    long head_digits = 0, tail_digits = 0, frac_digits = 0;
    bool seen_digit = false, in_frac = false;
    for (; *p; ++p) {
        if (*p == '.') {
            if (in_frac) throw ConfigError("bad decimal literal: " + text);
            in_frac = true;
            continue;
        }
        if (*p == 'e' || *p == 'E') break;
        if (*p < '0' || *p > '9') throw ConfigError("bad decimal literal: " + text);
        seen_digit = true;
        int d = *p - '0';
        if (head_digits < 15) {
            head = head * 10 + static_cast<unsigned>(d);
            ++head_digits;
        } else if (tail_digits < 15) {
            tail = tail * 10 + static_cast<unsigned>(d);
            ++tail_digits;
        } else {
            throw ConfigError("decimal literal too long: " + text);
        }
        if (in_frac) ++frac_digits;
    }
    if (!seen_digit) throw ConfigError("bad decimal literal: " + text);
    long exp10 = 0;
    if (*p == 'e' || *p == 'E') {
        ++p;
        char* end = nullptr;
        exp10 = std::strtol(p, &end, 10);
        if (end == p || *end != '\0') throw ConfigError("bad decimal literal: " + text);
    }
    exp10 -= frac_digits;

    // value = (head*10^tail_digits + tail) * 10^exp10
    Interval mant = Interval(static_cast<double>(head));
    if (tail_digits > 0)
        mant = mant * pow10_pos(tail_digits) + Interval(static_cast<double>(tail));
    Interval v = scale_pow10(mant, exp10);
    return negative ? -v : v;
}

} // namespace crossdiff
