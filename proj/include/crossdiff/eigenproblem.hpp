#ifndef CROSSDIFF_EIGENPROBLEM_HPP
#define CROSSDIFF_EIGENPROBLEM_HPP

#include <array>
#include <string>
#include <vector>

#include "crossdiff/blockop.hpp"
#include "crossdiff/steady.hpp"

namespace crossdiff {

// Rigorous enclosures c_j = cbar_j + eps_j of the nine coefficient
// functions of the linearized problem
//   xi''  + c1 xi' + c2 eta' + c3 xi + c4 eta + lambda(c5 xi + c6 eta) = 0
//   eta'' + c7 xi + c8 eta + lambda c9 eta = 0,
// built from a validated steady state (v,w,p,s) within radius r_nu of the
// stored candidate. cbar_j are finite sequences; the norm errors
// |c_j - cbar_j|_gamma are bounded by eps(j, gamma) for any 1 < gamma < nu.
struct CjEnclosure {
    std::array<RSeq, 9> cbar;   // c1, c2 sine; the rest cosine (c9 constant)
    ModelParams params;
    Weight nu;                  // weight of the steady validation
    Interval r_nu;              // steady validation radius
    Interval eps_u;             // |u - ubar|_nu bound, ubar = pbar*wbar

    CjEnclosure(ModelParams p, Weight steady_nu) : params(std::move(p)), nu(steady_nu) {}

    // retained building blocks for the eps formulas
    RSeq pbar, vbar;
    RSeq ubar, Kv, Ku, K2u, Ks, g8;    // g8 = r2 - b2 u - 2 a2 v (cosine)
    RSeq uv, up, vp, ug8, pg8;

    Interval eps(int j, const Weight& gamma) const; // j = 1..9
};

CjEnclosure cj_enclose(const SteadyX& X, double r_nu, const Weight& nu);

// Eigenpair unknowns: cosine sequences xi, eta (complex coefficients),
// the eigenvalue lambda, truncation n and the normalization index k0 with
// constraint xi_k0 = 1.
struct EigenX {
    CSeq xi, eta;
    CInterval lambda;
    int n = 0;
    int k0 = 0;
};

inline CompLayout eigen_layout(int n) { return CompLayout{n, {false, false, true}}; }

// Residual of the explicitly-known part of the eigenproblem map:
// (xi rows, eta rows, constraint xi_k0 - 1).
struct EigenResidual {
    CSeq xi, eta;
    CInterval lambda_row;
};
EigenResidual eigen_eval_Fbar(const EigenX& X, const CjEnclosure& cj);

// Jacobian of the truncated map at X, (2n+1) x (2n+1) complex.
CIMatrix eigen_DF_hat(const EigenX& X, const CjEnclosure& cj);

struct EigenOperators {
    CompLayout layout;
    Mat<std::complex<double>> A_float;
    BlockOp<CInterval> A;
    BlockOp<CInterval> Adag;
};
EigenOperators eigen_build_operators(const EigenX& X, const CjEnclosure& cj);

Interval bound_Y_eigen(const EigenX& X, const EigenOperators& ops, const CjEnclosure& cj,
                       const Weight& gamma);
Interval bound_Z0_eigen(const EigenOperators& ops, const Weight& gamma);

struct EigenZ1Parts {
    Interval finite, tail, eps_part, smoothing;
    Interval total;
};
EigenZ1Parts bound_Z1_eigen(const EigenX& X, const EigenOperators& ops, const CjEnclosure& cj,
                            const Weight& gamma, const Weight& gamma_tilde);

Interval bound_Z2_eigen(const EigenOperators& ops, const CjEnclosure& cj, const Weight& gamma);

struct EigenCertificate {
    ModelParams params;
    int n = 0, k0 = 0;
    std::string gamma_string, gamma_tilde_string;
    Interval Y, Z0, Z1, Z2;
    bool radius_found = false;
    double r_star = 0.0, r_min = 0.0, r_max = 0.0;
    std::complex<double> lambda = 0.0;
    Interval re_margin; // lower bound of Re(lambda) - r
    std::vector<std::complex<double>> xi, eta;
    std::string steady_hash;
    bool tainted = false;
    bool valid = false;
    std::string failure;
};

// Full instability check for an approximate eigenpair with Re(lambda) > 0.
EigenCertificate prove_instability(const EigenX& X, const CjEnclosure& cj, const Weight& gamma,
                                   const Weight& gamma_tilde, const std::string& gamma_string,
                                   const std::string& gamma_tilde_string);

bool recheck_certificate(const EigenCertificate& cert, std::string* why = nullptr);

} // namespace crossdiff

#endif
