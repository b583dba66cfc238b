#include "crossdiff/eigenproblem.hpp"

#include <algorithm>
#include <cmath>

#include "crossdiff/lapack.hpp"

namespace crossdiff {

namespace {

enum Comp { XI = 0, ETA = 1, LAM = 2 };

inline CInterval cos_profile_c(const CSeq& g, int k, int j) {
    CInterval e = g.at(std::abs(k - j));
    if (j >= 1) e += g.at(k + j);
    return e;
}

// d(c bullet K x)_k / dx_j for a sine sequence c and cosine slot x.
inline Interval bullet_K_profile(const RSeq& c, int k, int j) {
    if (j == 0) return Interval(0.0);
    Interval pij = ipi() * Interval(static_cast<double>(j));
    int d = k - j;
    Interval e = -c.at(k + j);
    if (d > 0) e += c.at(d);
    else if (d < 0) e -= c.at(-d);
    return pij * e;
}

CSeq lambda_combo(const RSeq& base, const RSeq& lam_part, const CInterval& lambda) {
    CSeq r = promote(base);
    CSeq l = promote(lam_part);
    CSeq sl = scale(lambda, l);
    // align lengths
    int n = std::max(r.len(), sl.len());
    r.c.resize(static_cast<size_t>(n));
    for (int k = 0; k < sl.len(); ++k) r.c[static_cast<size_t>(k)] += sl.c[static_cast<size_t>(k)];
    return r;
}

} // namespace

CjEnclosure cj_enclose(const SteadyX& X, double r_nu, const Weight& nu) {
    const ModelParams& q = X.params;
    CjEnclosure cj(X.params, nu);
    cj.r_nu = Interval(r_nu);

    cj.pbar = X.p;
    cj.vbar = X.v;
    cj.ubar = conv(ConvKind::ast, X.p, X.w);
    cj.eps_u = (seq_norm(X.p, nu) + seq_norm(X.w, nu)) * cj.r_nu + sqr(cj.r_nu) / Interval(4.0);

    cj.Kv = differentiate(X.v);
    cj.Ku = differentiate(cj.ubar);
    cj.K2u = differentiate(cj.Ku);
    cj.Ks = differentiate(X.s);
    cj.g8 = delta0(q.r2) + scale(-q.b2, cj.ubar) + scale(Interval(-2.0) * q.a2, X.v);

    cj.uv = conv(ConvKind::ast, cj.ubar, X.v);
    cj.up = conv(ConvKind::ast, cj.ubar, X.p);
    cj.vp = conv(ConvKind::ast, X.v, X.p);
    cj.ug8 = conv(ConvKind::ast, cj.ubar, cj.g8);
    cj.pg8 = conv(ConvKind::ast, X.p, cj.g8);

    Interval two_d12 = Interval(2.0) * q.d12;
    cj.cbar[0] = scale(-two_d12, conv(ConvKind::star, cj.Kv, X.p)); // c1
    cj.cbar[1] = scale(-two_d12, conv(ConvKind::star, cj.Ku, X.p)); // c2

    RSeq m3 = delta0(q.r1) + scale(Interval(-2.0) * q.a1, cj.ubar) + scale(-q.b1, X.v) + scale(q.d12, cj.Ks);
    cj.cbar[2] = conv(ConvKind::ast, m3, X.p) +
                 scale(q.d12 * q.b2 / q.d2, conv(ConvKind::ast, cj.uv, X.p)); // c3

    RSeq m4 = scale(-q.d12, cj.K2u) + scale(-q.b1, cj.ubar);
    cj.cbar[3] = conv(ConvKind::ast, m4, X.p) +
                 scale(-q.d12 / q.d2, conv(ConvKind::ast, cj.up, cj.g8)); // c4

    cj.cbar[4] = scale(Interval(-1.0), X.p);                 // c5
    cj.cbar[5] = scale(q.d12 / q.d2, cj.up);                 // c6
    cj.cbar[6] = scale(-q.b2 / q.d2, X.v);                   // c7
    cj.cbar[7] = scale(Interval(1.0) / q.d2, cj.g8);         // c8
    cj.cbar[8] = delta0(Interval(-1.0) / q.d2);              // c9
    return cj;
}

Interval CjEnclosure::eps(int j, const Weight& gamma) const {
    const ModelParams& q = params;
    if (!(gamma.nu.hi < nu.nu.lo)) throw WeightOrder("eps requires gamma < nu");
    const Interval& r = r_nu;
    const Interval& eu = eps_u;
    Interval np = seq_norm(pbar, gamma);
    switch (j) {
        case 1: {
            Interval u1 = upsilon(1, gamma, nu);
            return Interval(2.0) * q.d12 * (seq_norm(Kv, gamma) * r + np * u1 * r + u1 * sqr(r));
        }
        case 2: {
            Interval u1 = upsilon(1, gamma, nu);
            return Interval(2.0) * q.d12 * (seq_norm(Ku, gamma) * r + np * u1 * eu + u1 * eu * r);
        }
        case 3: {
            Interval u1 = upsilon(1, gamma, nu);
            RSeq m3 = delta0(q.r1) + scale(Interval(-2.0) * q.a1, ubar) + scale(-q.b1, vbar) +
                      scale(q.d12, Ks);
            Interval inner = Interval(2.0) * q.a1 * eu + q.b1 * r + q.d12 * u1 * r;
            return seq_norm(m3, gamma) * r + inner * (np + r) +
                   (q.d12 * q.b2 / q.d2) *
                       (seq_norm(uv, gamma) * r + seq_norm(up, gamma) * r + seq_norm(vp, gamma) * eu +
                        seq_norm(ubar, gamma) * sqr(r) + seq_norm(vbar, gamma) * eu * r +
                        np * eu * r + eu * sqr(r));
        }
        case 4: {
            Interval u2 = upsilon(2, gamma, nu);
            RSeq m4 = scale(-q.d12, K2u) + scale(-q.b1, ubar);
            Interval inner = q.d12 * u2 * eu + q.b1 * eu;
            Interval dg = q.b2 * eu + Interval(2.0) * q.a2 * r;
            return seq_norm(m4, gamma) * r + inner * (np + r) +
                   (q.d12 / q.d2) *
                       (seq_norm(up, gamma) * dg + seq_norm(ug8, gamma) * r + seq_norm(pg8, gamma) * eu +
                        seq_norm(g8, gamma) * eu * r +
                        (seq_norm(ubar, gamma) * r + np * eu + eu * r) * dg);
        }
        case 5: return r;
        case 6:
            return (q.d12 / q.d2) *
                   (seq_norm(ubar, gamma) * r + imax(seq_norm(up, gamma), np) * eu + eu * r);
        case 7: return (q.b2 / q.d2) * r;
        case 8: return (Interval(1.0) / q.d2) * (q.b2 * eu + Interval(2.0) * q.a2 * r);
        case 9: return Interval(0.0);
        default: throw DomainError("eps index out of range");
    }
}

EigenResidual eigen_eval_Fbar(const EigenX& X, const CjEnclosure& cj) {
    CSeq C1 = promote(cj.cbar[0]), C2 = promote(cj.cbar[1]), C3 = promote(cj.cbar[2]);
    CSeq C4 = promote(cj.cbar[3]), C5 = promote(cj.cbar[4]), C6 = promote(cj.cbar[5]);
    CSeq C7 = promote(cj.cbar[6]), C8 = promote(cj.cbar[7]), C9 = promote(cj.cbar[8]);

    CSeq Kxi = differentiate(X.xi), Keta = differentiate(X.eta);

    // The product c1 xi' has cosine coefficients +(c1 bullet K xi) under the
    // literal signed-folding definition of bullet (the sine pair picks up a
    // sign twice: once from xi' = -K xi, once from the folding itself).
    EigenResidual R;
    R.xi = scale(Interval(-1.0), differentiate(Kxi));
    R.xi.parity = Parity::cosine;
    R.xi = R.xi + conv(ConvKind::bullet, C1, Kxi) + conv(ConvKind::bullet, C2, Keta) +
           conv(ConvKind::ast, C3, X.xi) + conv(ConvKind::ast, C4, X.eta) +
           scale(X.lambda, conv(ConvKind::ast, C5, X.xi)) +
           scale(X.lambda, conv(ConvKind::ast, C6, X.eta));

    R.eta = scale(Interval(-1.0), differentiate(Keta));
    R.eta.parity = Parity::cosine;
    R.eta = R.eta + conv(ConvKind::ast, C7, X.xi) + conv(ConvKind::ast, C8, X.eta) +
            scale(X.lambda, conv(ConvKind::ast, C9, X.eta));

    R.lambda_row = X.xi.at(X.k0) - CInterval(1.0);
    return R;
}

CIMatrix eigen_DF_hat(const EigenX& X, const CjEnclosure& cj) {
    const int n = X.n;
    CompLayout lay = eigen_layout(n);
    CIMatrix J(lay.dim(), lay.dim());
    Interval pi = ipi();

    CSeq c3l5 = lambda_combo(cj.cbar[2], cj.cbar[4], X.lambda);
    CSeq c4l6 = lambda_combo(cj.cbar[3], cj.cbar[5], X.lambda);
    CSeq c89l = lambda_combo(cj.cbar[7], cj.cbar[8], X.lambda);
    CSeq c7 = promote(cj.cbar[6]);

    CSeq col_xi = conv(ConvKind::ast, promote(cj.cbar[4]), X.xi) +
                  conv(ConvKind::ast, promote(cj.cbar[5]), X.eta);
    CSeq col_eta = conv(ConvKind::ast, promote(cj.cbar[8]), X.eta);

    auto at = [&](int rc, int k, int cc, int j) -> CInterval& {
        return J(lay.offset(rc) + k, lay.offset(cc) + j);
    };

    for (int k = 0; k < n; ++k) {
        Interval pik2 = sqr(pi * Interval(static_cast<double>(k)));
        at(XI, k, XI, k) += CInterval(-pik2);
        at(ETA, k, ETA, k) += CInterval(-pik2);
        for (int j = 0; j < n; ++j) {
            at(XI, k, XI, j) += CInterval(bullet_K_profile(cj.cbar[0], k, j)) + cos_profile_c(c3l5, k, j);
            at(XI, k, ETA, j) += CInterval(bullet_K_profile(cj.cbar[1], k, j)) + cos_profile_c(c4l6, k, j);
            at(ETA, k, XI, j) += cos_profile_c(c7, k, j);
            at(ETA, k, ETA, j) += cos_profile_c(c89l, k, j);
        }
        at(XI, k, LAM, 0) = col_xi.at(k);
        at(ETA, k, LAM, 0) = col_eta.at(k);
    }
    at(LAM, 0, XI, X.k0) = CInterval(1.0);
    return J;
}

EigenOperators eigen_build_operators(const EigenX& X, const CjEnclosure& cj) {
    EigenOperators ops;
    ops.layout = eigen_layout(X.n);
    CIMatrix J = eigen_DF_hat(X, cj);
    Mat<std::complex<double>> Ainv = midpoint(J);
    if (!lapack::invert(Ainv)) throw SingularJacobian("eigen Jacobian block is numerically singular");
    ops.A_float = Ainv;
    ops.A = BlockOp<CInterval>(ops.layout, promote(Ainv));
    ops.Adag = BlockOp<CInterval>(ops.layout, std::move(J));
    ops.Adag.tails[XI] = {true, Interval(-1.0), 2};
    ops.Adag.tails[ETA] = {true, Interval(-1.0), 2};
    ops.A.tails[XI] = {true, Interval(-1.0), -2};
    ops.A.tails[ETA] = {true, Interval(-1.0), -2};
    return ops;
}

namespace {

Interval xnorm(const std::vector<CSeq>& comps, const Weight& gamma) {
    Interval acc = seq_norm(comps[XI], gamma) + seq_norm(comps[ETA], gamma);
    acc += iabs(comps[LAM].at(0));
    return acc;
}

} // namespace

Interval bound_Y_eigen(const EigenX& X, const EigenOperators& ops, const CjEnclosure& cj,
                       const Weight& gamma) {
    EigenResidual R = eigen_eval_Fbar(X, cj);
    CSeq lam_seq;
    lam_seq.c = {R.lambda_row};
    std::vector<CSeq> AF = apply_op(ops.A, {R.xi, R.eta, lam_seq});
    Interval y0 = xnorm(AF, gamma);

    std::vector<Interval> th = theta_norms(ops.A.finite, ops.layout, gamma, &ops.A.tails);
    Interval abs_lam = iabs(X.lambda);
    Interval nxi = seq_norm(X.xi, gamma), neta = seq_norm(X.eta, gamma);
    Interval nKxi = seq_norm(differentiate(X.xi), gamma), nKeta = seq_norm(differentiate(X.eta), gamma);

    Interval y_eps = th[XI] * (nKxi * cj.eps(1, gamma) + nKeta * cj.eps(2, gamma) +
                               nxi * (cj.eps(3, gamma) + abs_lam * cj.eps(5, gamma)) +
                               neta * (cj.eps(4, gamma) + abs_lam * cj.eps(6, gamma))) +
                    th[ETA] * (nxi * cj.eps(7, gamma) + neta * (cj.eps(8, gamma) + abs_lam * cj.eps(9, gamma)));
    return y0 + y_eps;
}

Interval bound_Z0_eigen(const EigenOperators& ops, const Weight& gamma) {
    CIMatrix C = matmul_point_left(ops.A_float, ops.Adag.finite);
    for (int i = 0; i < C.rows; ++i)
        for (int j = 0; j < C.cols; ++j)
            C(i, j) = (i == j) ? CInterval(1.0) - C(i, j) : -C(i, j);
    std::vector<Interval> theta = theta_norms(C, ops.layout, gamma);
    Interval z0 = theta[0];
    for (size_t i = 1; i < theta.size(); ++i) z0 = imax(z0, theta[i]);
    return z0;
}

EigenZ1Parts bound_Z1_eigen(const EigenX& X, const EigenOperators& ops, const CjEnclosure& cj,
                            const Weight& gamma, const Weight& gamma_tilde) {
    if (!(gamma.nu.hi < gamma_tilde.nu.lo) || !(gamma_tilde.nu.hi < cj.nu.nu.lo))
        throw WeightOrder("need gamma < gamma_tilde < nu");
    const int n = X.n;
    CompLayout lay = ops.layout;
    Interval pi = ipi();
    Interval pin = pi * Interval(static_cast<double>(n));
    Interval pin2 = sqr(pin);

    CSeq c3K1l5 = lambda_combo(cj.cbar[2] - differentiate(cj.cbar[0]), cj.cbar[4], X.lambda);
    CSeq c4K2l6 = lambda_combo(cj.cbar[3] - differentiate(cj.cbar[1]), cj.cbar[5], X.lambda);
    CSeq c89l = lambda_combo(cj.cbar[7], cj.cbar[8], X.lambda);

    // finite part via |A| alpha
    IVector a_xi(static_cast<size_t>(lay.dim()), Interval(0.0));
    IVector a_eta(static_cast<size_t>(lay.dim()), Interval(0.0));
    for (int k = 0; k < n; ++k) {
        Interval pik = pi * Interval(static_cast<double>(k));
        Interval phi1 = tail_product_bound(cj.cbar[0], n, k, gamma);
        Interval phi2 = tail_product_bound(cj.cbar[1], n, k, gamma);
        a_xi[static_cast<size_t>(lay.offset(XI) + k)] =
            (k >= 1 ? pik * phi1 : Interval(0.0)) + tail_product_bound(c3K1l5, n, k, gamma);
        a_xi[static_cast<size_t>(lay.offset(ETA) + k)] = tail_product_bound(cj.cbar[6], n, k, gamma);
        a_eta[static_cast<size_t>(lay.offset(XI) + k)] =
            (k >= 1 ? pik * phi2 : Interval(0.0)) + tail_product_bound(c4K2l6, n, k, gamma);
        a_eta[static_cast<size_t>(lay.offset(ETA) + k)] = tail_product_bound(c89l, n, k, gamma);
    }
    Mat<Interval> absA = entrywise_abs(ops.A.finite);
    auto weighted_norm = [&](const IVector& img) {
        std::vector<Interval> omega = norm_weights(gamma, n);
        Interval acc(0.0);
        for (int comp = 0; comp < 2; ++comp)
            for (int k = 0; k < n; ++k)
                acc += omega[static_cast<size_t>(k)] * iabs(img[static_cast<size_t>(lay.offset(comp) + k)]);
        acc += iabs(img[static_cast<size_t>(lay.offset(LAM))]);
        return acc;
    };
    Interval finite = imax(weighted_norm(enclose_matvec(absA, a_xi)),
                           weighted_norm(enclose_matvec(absA, a_eta)));

    // tail part
    Interval t1 = seq_norm(cj.cbar[0], gamma) / pin +
                  (seq_norm(c3K1l5, gamma) + seq_norm(cj.cbar[6], gamma)) / pin2;
    Interval t2 = seq_norm(cj.cbar[1], gamma) / pin +
                  (seq_norm(c4K2l6, gamma) + seq_norm(c89l, gamma)) / pin2;
    CSeq C5xi = conv(ConvKind::ast, promote(cj.cbar[4]), X.xi);
    CSeq C6eta = conv(ConvKind::ast, promote(cj.cbar[5]), X.eta);
    CSeq C9eta = conv(ConvKind::ast, promote(cj.cbar[8]), X.eta);
    Interval t3 = (seq_norm(C5xi, gamma) + seq_norm(C6eta, gamma) + seq_norm(C9eta, gamma)) / pin2;
    Interval tail = imax(imax(t1, t2), t3);

    // unbounded-coefficient remainder, split through the smoothing of A
    std::vector<Interval> th = theta_norms(ops.A.finite, ops.layout, gamma, &ops.A.tails);
    Interval u1gt = upsilon(1, gamma, gamma_tilde);
    Interval abs_lam = iabs(X.lambda);
    Interval e1 = th[XI] * (u1gt * cj.eps(1, gamma_tilde) + cj.eps(3, gamma) + abs_lam * cj.eps(5, gamma)) +
                  th[ETA] * cj.eps(7, gamma);
    Interval e2 = th[XI] * (u1gt * cj.eps(2, gamma_tilde) + cj.eps(4, gamma) + abs_lam * cj.eps(6, gamma)) +
                  th[ETA] * (cj.eps(8, gamma) + abs_lam * cj.eps(9, gamma));
    Interval e3 = th[XI] * (seq_norm(X.xi, gamma) * cj.eps(5, gamma) + seq_norm(X.eta, gamma) * cj.eps(6, gamma)) +
                  th[ETA] * seq_norm(X.eta, gamma) * cj.eps(9, gamma);
    Interval eps_part = imax(imax(e1, e2), e3);

    std::vector<Interval> thK = theta_norms(ops.A.finite, ops.layout, gamma, &ops.A.tails, XI);
    Interval smoothing = thK[XI] * imax(cj.eps(1, gamma), cj.eps(2, gamma));

    EigenZ1Parts parts{finite, tail, eps_part, smoothing, Interval(0.0)};
    parts.total = finite + tail + eps_part + smoothing;
    return parts;
}

Interval bound_Z2_eigen(const EigenOperators& ops, const CjEnclosure& cj, const Weight& gamma) {
    std::vector<Interval> th = theta_norms(ops.A.finite, ops.layout, gamma, &ops.A.tails);
    Interval a = th[XI] * (seq_norm(cj.cbar[4], gamma) + cj.eps(5, gamma));
    Interval b = th[XI] * (seq_norm(cj.cbar[5], gamma) + cj.eps(6, gamma)) +
                 th[ETA] * (seq_norm(cj.cbar[8], gamma) + cj.eps(9, gamma));
    return imax(a, b);
}

namespace {

bool all_finite(const EigenCertificate& c) {
    return c.Y.finite() && c.Z0.finite() && c.Z1.finite() && c.Z2.finite();
}

} // namespace

EigenCertificate prove_instability(const EigenX& X, const CjEnclosure& cj, const Weight& gamma,
                                   const Weight& gamma_tilde, const std::string& gamma_string,
                                   const std::string& gamma_tilde_string) {
    EigenCertificate cert;
    cert.params = cj.params;
    cert.n = X.n;
    cert.k0 = X.k0;
    cert.gamma_string = gamma_string;
    cert.gamma_tilde_string = gamma_tilde_string;
    cert.lambda = midpoint(X.lambda);
    cert.xi.reserve(static_cast<size_t>(X.xi.len()));
    for (const auto& z : X.xi.c) cert.xi.push_back(midpoint(z));
    for (const auto& z : X.eta.c) cert.eta.push_back(midpoint(z));

    EigenOperators ops = eigen_build_operators(X, cj);
    cert.Y = bound_Y_eigen(X, ops, cj, gamma);
    cert.Z0 = bound_Z0_eigen(ops, gamma);
    cert.Z1 = bound_Z1_eigen(X, ops, cj, gamma, gamma_tilde).total;
    cert.Z2 = bound_Z2_eigen(ops, cj, gamma);
    cert.tainted = !all_finite(cert);

    RadiiResult rr = radii_find_negative(cert.Y, cert.Z0, cert.Z1, {cert.Z2, Interval(0.0), Interval(0.0)});
    cert.radius_found = rr.found;
    if (!rr.found) {
        cert.failure = "no radius with P(r) < 0";
        return cert;
    }
    cert.r_star = rr.r_star;
    cert.r_min = rr.r_min;
    cert.r_max = rr.r_max;
    cert.re_margin = X.lambda.re - Interval(rr.r_star);

    if (cert.tainted) {
        cert.failure = "overflow tainted the computation";
    } else if (!(cert.re_margin.lo > 0.0)) {
        cert.failure = "Re(lambda) does not exceed the validation radius";
    } else {
        cert.valid = true;
    }
    return cert;
}

bool recheck_certificate(const EigenCertificate& cert, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (cert.tainted) return fail("tainted");
    if (!cert.radius_found) return fail("no verified radius stored");
    Interval ri(cert.r_star);
    Interval pv = cert.Z2 * sqr(ri) - (Interval(1.0) - (cert.Z0 + cert.Z1)) * ri + cert.Y;
    if (!(pv.hi < 0.0)) return fail("stored bounds do not give P(r) < 0");
    if (!(cert.re_margin.lo > 0.0)) return fail("stored real-part margin not positive");
    return true;
}

} // namespace crossdiff
