#ifndef CROSSDIFF_STEADY_HPP
#define CROSSDIFF_STEADY_HPP

#include <array>
#include <string>
#include <vector>

#include "crossdiff/blockop.hpp"
#include "crossdiff/model.hpp"

namespace crossdiff {

// Floating-point approximate solution (Fourier coefficients).
struct SteadyCandidate {
    std::vector<double> v, w, p, s;
    int len() const { return static_cast<int>(v.size()); }
};

// Interval unknowns of the extended first-order system: cosine sequences
// v, w, p and the sine sequence s = v', truncated at m, plus the model
// parameters they belong to.
struct SteadyX {
    RSeq v, w, p, s;
    int m = 0;
    ModelParams params;
};

SteadyX promote_candidate(const SteadyCandidate& cand, const ModelParams& params, int m);

// Component order (v, w, p, s) throughout; the k=0 row of the p component is
// the scalar constraint p(0)(d1 + d12 v(0)) = 1.
inline CompLayout steady_layout(int m) { return CompLayout{m, {false, false, false, false}}; }

// Exact image of the truncated state under the zero-finding map; components
// carry their full finite support (up to 4m-3 for the w row).
std::array<RSeq, 4> steady_eval_F(const SteadyX& X);

// Jacobian of the truncated map at X, as a 4m x 4m interval matrix.
IMatrix steady_DF_hat(const SteadyX& X);

// Approximate inverse A (floating, promoted) and approximate Jacobian Adag
// (interval finite block), both with the diagonal tail rules
// Adag: (-pi k, -(pi k)^2, -pi k, d2 pi k),  A: their reciprocals.
struct SteadyOperators {
    CompLayout layout;
    Mat<double> A_float;
    BlockOp<Interval> A;
    BlockOp<Interval> Adag;
};
SteadyOperators steady_build_operators(const SteadyX& X);

Interval bound_Y_steady(const SteadyX& X, const SteadyOperators& ops, const Weight& nu);
Interval bound_Z0_steady(const SteadyOperators& ops, const Weight& nu);

struct Z1Parts {
    Interval finite, tail, total;
};
Z1Parts bound_Z1_steady(const SteadyX& X, const SteadyOperators& ops, const Weight& nu);

// (c0, c1, c2) with Z2(r) = c0 + c1 r + c2 r^2.
std::array<Interval, 3> bound_Z2_steady(const SteadyX& X, const SteadyOperators& ops, const Weight& nu);

// Search for radii where the radii polynomial
//   P(r) = Z2(r) r^2 - (1 - (Z0+Z1)) r + Y
// is rigorously negative, on a log grid of 64 points in [upper(Y), 1].
struct RadiiResult {
    bool found = false;
    double r_star = 0.0; // smallest grid radius with upper(P) < 0
    double r_min = 0.0;
    double r_max = 0.0;
    Interval p_at_r_star;
};
RadiiResult radii_find_negative(const Interval& Y, const Interval& Z0, const Interval& Z1,
                                const std::array<Interval, 3>& Z2_coeffs);

// Certified lower bound of inf_{x in [0,1]} f(x) - r for a finite cosine
// sequence f: interval evaluation on 1024 dyadic subintervals with a
// derivative Lipschitz bound, refining failing subintervals by bisection.
Interval positivity_margin(const RSeq& f, double r);

// (|w|_nu + |p|_nu) r + r^2/4, the sup-norm error bound for u = p w.
Interval u_error_bound(const SteadyX& X, double r, const Weight& nu);

struct SteadyCertificate {
    ModelParams params;
    int m = 0;
    std::string nu_string;
    Interval Y, Z0, Z1;
    std::array<Interval, 3> Z2_coeffs;
    bool radius_found = false;
    double r_star = 0.0, r_min = 0.0, r_max = 0.0;
    Interval margin_v, margin_w; // lower bounds of inf v - r, inf w - r
    Interval u_err;
    double v_at_zero = 0.0;
    SteadyCandidate candidate;
    bool tainted = false;
    bool valid = false;
    std::string failure; // empty when valid
};

SteadyCertificate validate_steady(const SteadyCandidate& cand, const ModelParams& params, int m,
                                  const Weight& nu, const std::string& nu_string);

// Re-assert validity from the stored bounds alone (radii polynomial sign at
// r_star, margins, taint); no heavy recomputation.
bool recheck_certificate(const SteadyCertificate& cert, std::string* why = nullptr);

} // namespace crossdiff

#endif
