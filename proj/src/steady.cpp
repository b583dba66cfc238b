#include "crossdiff/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crossdiff/lapack.hpp"

namespace crossdiff {

namespace {

enum Comp { V = 0, W = 1, P = 2, S = 3 };

// Derivative profiles of the convolution products with respect to one slot.
// cos_profile: d(g*x)_k/dx_j for cosine g and cosine slot.
inline Interval cos_profile(const RSeq& g, int k, int j) {
    Interval e = g.at(std::abs(k - j));
    if (j >= 1) e += g.at(k + j);
    return e;
}

// d(g star x)_k/dx_j, g sine, x the cosine slot.
inline Interval star_cos_profile(const RSeq& g, int k, int j) {
    if (j == 0) return k >= 1 ? g.at(k) : Interval(0.0);
    int d = k - j;
    Interval e = g.at(k + j);
    if (d > 0) e += g.at(d);
    else if (d < 0) e -= g.at(-d);
    return e;
}

// d(x star q)_k/dx_j, q cosine, x the sine slot.
inline Interval sine_slot_profile(const RSeq& q, int k, int j) {
    if (j == 0) return Interval(0.0);
    return q.at(std::abs(k - j)) - q.at(k + j);
}

// The sequences whose convolution action makes up the Jacobian blocks.
struct Profiles {
    RSeq pw, pp, pv, vw, ww, vv;
    RSeq ppw, pww;
    RSeq sp;            // sine
    RSeq gw_v, gw_w, gw_p;
    RSeq gp_p;          // sine, includes the factor 2 d12
    RSeq gp_s;          // cosine, d12 (p*p)
    RSeq gs_v, gs_w, gs_p;
    Interval psum, vsum, Dv; // p(0), v(0), d1 + d12 v(0)
};

Profiles make_profiles(const SteadyX& X) {
    const ModelParams& q = X.params;
    Profiles pr;
    pr.pw = conv(ConvKind::ast, X.p, X.w);
    pr.pp = conv(ConvKind::ast, X.p, X.p);
    pr.pv = conv(ConvKind::ast, X.p, X.v);
    pr.vw = conv(ConvKind::ast, X.v, X.w);
    pr.ww = conv(ConvKind::ast, X.w, X.w);
    pr.vv = conv(ConvKind::ast, X.v, X.v);
    pr.ppw = conv(ConvKind::ast, pr.pp, X.w);
    pr.pww = conv(ConvKind::ast, pr.pw, X.w);
    pr.sp = conv(ConvKind::star, X.s, X.p);
    pr.gw_v = scale(-q.b1, pr.pw);
    pr.gw_w = scale(q.r1, X.p) + scale(Interval(-2.0) * q.a1, pr.ppw) + scale(-q.b1, pr.pv);
    pr.gw_p = scale(q.r1, X.w) + scale(Interval(-2.0) * q.a1, pr.pww) + scale(-q.b1, pr.vw);
    pr.gp_p = scale(Interval(2.0) * q.d12, pr.sp);
    pr.gp_s = scale(q.d12, pr.pp);
    pr.gs_v = delta0(q.r2) + scale(Interval(-2.0) * q.a2, X.v) + scale(-q.b2, pr.pw);
    pr.gs_w = scale(-q.b2, pr.pv);
    pr.gs_p = scale(-q.b2, pr.vw);
    pr.psum = eval_at_zero(X.p);
    pr.vsum = eval_at_zero(X.v);
    pr.Dv = q.d1 + q.d12 * pr.vsum;
    return pr;
}

RSeq zero_pad(const std::vector<double>& c, int m, Parity par) {
    RSeq r;
    r.parity = par;
    r.c.assign(static_cast<size_t>(m), Interval(0.0));
    for (size_t k = 0; k < c.size() && k < static_cast<size_t>(m); ++k) r.c[k] = Interval(c[k]);
    return r;
}

} // namespace

SteadyX promote_candidate(const SteadyCandidate& cand, const ModelParams& params, int m) {
    if (cand.len() > m) throw DimensionMismatch("candidate longer than requested truncation");
    SteadyX X;
    X.m = m;
    X.params = params;
    X.v = zero_pad(cand.v, m, Parity::cosine);
    X.w = zero_pad(cand.w, m, Parity::cosine);
    X.p = zero_pad(cand.p, m, Parity::cosine);
    X.s = zero_pad(cand.s, m, Parity::sine);
    return X;
}

std::array<RSeq, 4> steady_eval_F(const SteadyX& X) {
    const ModelParams& q = X.params;
    RSeq pw = conv(ConvKind::ast, X.p, X.w);
    RSeq pp = conv(ConvKind::ast, X.p, X.p);
    RSeq ww = conv(ConvKind::ast, X.w, X.w);
    RSeq vv = conv(ConvKind::ast, X.v, X.v);
    RSeq pvw = conv(ConvKind::ast, conv(ConvKind::ast, X.p, X.v), X.w);
    RSeq ppww = conv(ConvKind::ast, pp, ww);
    RSeq spp = conv(ConvKind::star, X.s, pp);

    // F^(v) = -K v - s  (rows k < m; zero beyond)
    RSeq Fv = scale(Interval(-1.0), differentiate(X.v)) - X.s;

    // F^(w) = -K^2 w + r1 (p*w) - a1 (p*p*w*w) - b1 (p*v*w)
    RSeq Fw = scale(Interval(-1.0), differentiate(differentiate(X.w))) + scale(q.r1, pw) +
              scale(-q.a1, ppww) + scale(-q.b1, pvw);

    // F^(p): k = 0 carries the scalar constraint, k >= 1 the p equation
    RSeq Fp = scale(Interval(-1.0), differentiate(X.p)) + scale(q.d12, spp);
    Interval psum = eval_at_zero(X.p);
    Interval vsum = eval_at_zero(X.v);
    Fp.c[0] = psum * (q.d1 + q.d12 * vsum) - Interval(1.0);

    // F^(s) = d2 K s + r2 v - a2 (v*v) - b2 (p*v*w)
    RSeq Fs = scale(q.d2, differentiate(X.s)) + scale(q.r2, X.v) + scale(-q.a2, vv) + scale(-q.b2, pvw);

    return {Fv, Fw, Fp, Fs};
}

IMatrix steady_DF_hat(const SteadyX& X) {
    const int m = X.m;
    const ModelParams& q = X.params;
    Profiles pr = make_profiles(X);
    CompLayout lay = steady_layout(m);
    IMatrix J(lay.dim(), lay.dim());
    Interval pi = ipi();

    auto at = [&](Comp rc, int k, Comp cc, int j) -> Interval& {
        return J(lay.offset(rc) + k, lay.offset(cc) + j);
    };

    for (int k = 0; k < m; ++k) {
        Interval pik = pi * Interval(static_cast<double>(k));
        // v rows: -pi k v_k - s_k
        at(V, k, V, k) = -pik;
        at(V, k, S, k) = Interval(-1.0);
        // w rows
        at(W, k, W, k) = -sqr(pik);
        for (int j = 0; j < m; ++j) {
            at(W, k, V, j) += cos_profile(pr.gw_v, k, j);
            at(W, k, W, j) += cos_profile(pr.gw_w, k, j);
            at(W, k, P, j) += cos_profile(pr.gw_p, k, j);
        }
        // p rows: constraint at k = 0, otherwise -pi k p_k + d12 (s star p*p)_k
        if (k == 0) {
            for (int j = 0; j < m; ++j) {
                Interval wj(j == 0 ? 1.0 : 2.0);
                at(P, 0, P, j) = wj * pr.Dv;
                at(P, 0, V, j) = wj * q.d12 * pr.psum;
            }
        } else {
            at(P, k, P, k) = -pik;
            for (int j = 0; j < m; ++j) {
                at(P, k, P, j) += star_cos_profile(pr.gp_p, k, j);
                at(P, k, S, j) += sine_slot_profile(pr.gp_s, k, j);
            }
        }
        // s rows
        at(S, k, S, k) = q.d2 * pik;
        for (int j = 0; j < m; ++j) {
            at(S, k, V, j) += cos_profile(pr.gs_v, k, j);
            at(S, k, W, j) += cos_profile(pr.gs_w, k, j);
            at(S, k, P, j) += cos_profile(pr.gs_p, k, j);
        }
    }
    return J;
}

SteadyOperators steady_build_operators(const SteadyX& X) {
    SteadyOperators ops;
    ops.layout = steady_layout(X.m);
    IMatrix J = steady_DF_hat(X);
    Mat<double> Ainv = midpoint(J);
    if (!lapack::invert(Ainv)) throw SingularJacobian("finite Jacobian block is numerically singular");
    ops.A_float = Ainv;
    ops.A = BlockOp<Interval>(ops.layout, promote(Ainv));
    ops.Adag = BlockOp<Interval>(ops.layout, std::move(J));

    const ModelParams& q = X.params;
    ops.Adag.tails[V] = {true, Interval(-1.0), 1};
    ops.Adag.tails[W] = {true, Interval(-1.0), 2};
    ops.Adag.tails[P] = {true, Interval(-1.0), 1};
    ops.Adag.tails[S] = {true, q.d2, 1};
    ops.A.tails[V] = {true, Interval(-1.0), -1};
    ops.A.tails[W] = {true, Interval(-1.0), -2};
    ops.A.tails[P] = {true, Interval(-1.0), -1};
    ops.A.tails[S] = {true, Interval(1.0) / q.d2, -1};
    return ops;
}

Interval bound_Y_steady(const SteadyX& X, const SteadyOperators& ops, const Weight& nu) {
    std::array<RSeq, 4> F = steady_eval_F(X);
    std::vector<RSeq> Fvec(F.begin(), F.end());
    std::vector<RSeq> AF = apply_op(ops.A, Fvec);
    Interval y(0.0);
    for (const auto& comp : AF) y += seq_norm(comp, nu);
    return y;
}

Interval bound_Z0_steady(const SteadyOperators& ops, const Weight& nu) {
    IMatrix C = matmul_point_left(ops.A_float, ops.Adag.finite);
    for (int i = 0; i < C.rows; ++i) C(i, i) = Interval(1.0) - C(i, i);
    for (int i = 0; i < C.rows; ++i)
        for (int j = 0; j < C.cols; ++j)
            if (i != j) C(i, j) = -C(i, j);
    std::vector<Interval> theta = theta_norms(C, ops.layout, nu);
    Interval z0 = theta[0];
    for (size_t i = 1; i < theta.size(); ++i) z0 = imax(z0, theta[i]);
    return z0;
}

Z1Parts bound_Z1_steady(const SteadyX& X, const SteadyOperators& ops, const Weight& nu) {
    const int m = X.m;
    const ModelParams& q = X.params;
    Profiles pr = make_profiles(X);
    CompLayout lay = ops.layout;
    Interval pim = ipi() * Interval(static_cast<double>(m));
    Interval two_nu_m = Interval(2.0) / ipow(nu.nu, m);

    // Finite part: |A| acting on the per-column bound vectors built from the
    // tail-convolution estimates of the Jacobian profile sequences.
    std::vector<IVector> alphas(4, IVector(static_cast<size_t>(lay.dim()), Interval(0.0)));
    for (int k = 0; k < m; ++k) {
        alphas[V][static_cast<size_t>(lay.offset(W) + k)] = tail_product_bound(pr.gw_v, m, k, nu);
        alphas[V][static_cast<size_t>(lay.offset(S) + k)] = tail_product_bound(pr.gs_v, m, k, nu);
        alphas[W][static_cast<size_t>(lay.offset(W) + k)] = tail_product_bound(pr.gw_w, m, k, nu);
        alphas[W][static_cast<size_t>(lay.offset(S) + k)] = tail_product_bound(pr.gs_w, m, k, nu);
        alphas[P][static_cast<size_t>(lay.offset(W) + k)] = tail_product_bound(pr.gw_p, m, k, nu);
        if (k >= 1) alphas[P][static_cast<size_t>(lay.offset(P) + k)] = tail_product_bound(pr.gp_p, m, k, nu);
        alphas[P][static_cast<size_t>(lay.offset(S) + k)] = tail_product_bound(pr.gs_p, m, k, nu);
        alphas[S][static_cast<size_t>(lay.offset(P) + k)] = tail_product_bound(pr.gp_s, m, k, nu);
    }
    // constraint-row entries from the unstored part of the point sums
    alphas[V][static_cast<size_t>(lay.offset(P))] += iabs(q.d12 * pr.psum) * two_nu_m;
    alphas[P][static_cast<size_t>(lay.offset(P))] += iabs(pr.Dv) * two_nu_m;

    Mat<Interval> absA = entrywise_abs(ops.A.finite);
    Interval finite(0.0);
    for (int c = 0; c < 4; ++c) {
        IVector img = enclose_matvec(absA, alphas[static_cast<size_t>(c)]);
        Interval nrm(0.0);
        std::vector<Interval> omega = norm_weights(nu, m);
        for (int comp = 0; comp < 4; ++comp)
            for (int k = 0; k < m; ++k)
                nrm += omega[static_cast<size_t>(k)] * iabs(img[static_cast<size_t>(lay.offset(comp) + k)]);
        finite = imax(finite, nrm);
    }

    // Tail part: norms of the profile sequences against the diagonal tail
    // weights of A.
    Interval pim2 = sqr(pim);
    Interval d2pim = q.d2 * pim;
    Interval g_v = seq_norm(pr.gw_v, nu) / pim2 + seq_norm(pr.gs_v, nu) / d2pim;
    Interval g_w = seq_norm(pr.gw_w, nu) / pim2 + seq_norm(pr.gs_w, nu) / d2pim;
    Interval g_p = seq_norm(pr.gw_p, nu) / pim2 + seq_norm(pr.gp_p, nu) / pim + seq_norm(pr.gs_p, nu) / d2pim;
    Interval g_s = Interval(1.0) / pim + seq_norm(pr.gp_s, nu) / pim;
    Interval tail = imax(imax(g_v, g_w), imax(g_p, g_s));

    return {finite, tail, finite + tail};
}

std::array<Interval, 3> bound_Z2_steady(const SteadyX& X, const SteadyOperators& ops, const Weight& nu) {
    const ModelParams& q = X.params;
    std::vector<Interval> th = theta_norms(ops.A.finite, ops.layout, nu, &ops.A.tails);
    Interval thw = th[W], thp = th[P], ths = th[S];

    RSeq pw = conv(ConvKind::ast, X.p, X.w);
    RSeq pp = conv(ConvKind::ast, X.p, X.p);
    RSeq ww = conv(ConvKind::ast, X.w, X.w);
    Interval np = seq_norm(X.p, nu), nw = seq_norm(X.w, nu), nv = seq_norm(X.v, nu), ns = seq_norm(X.s, nu);
    RSeq hw = delta0(q.r1) + scale(Interval(-4.0) * q.a1, pw) + scale(-q.b1, X.v);

    Interval a_vv = Interval(2.0) * q.a2 * ths;
    Interval a_ww = Interval(2.0) * q.a1 * seq_norm(pp, nu) * thw;
    Interval a_pp = Interval(2.0) * q.a1 * seq_norm(ww, nu) * thw + Interval(2.0) * q.d12 * ns * thp;
    Interval a_vw = q.b1 * np * thw + q.b2 * np * ths;
    Interval a_vp = q.b1 * nw * thw + q.d12 * thp + q.b2 * nw * ths;
    Interval a_wp = seq_norm(hw, nu) * thw + q.b2 * nv * ths;
    Interval a_ps = Interval(2.0) * q.d12 * np * thp;

    Interval c0 = imax(imax(imax(a_vv, a_ww), imax(a_pp, a_vw)), imax(imax(a_vp, a_wp), a_ps));

    Interval b_vwp = q.b1 * thw + q.b2 * ths;
    Interval b_wwp = Interval(4.0) * q.a1 * np * thw;
    Interval b_wpp = Interval(4.0) * q.a1 * nw * thw;
    Interval b_pps = Interval(2.0) * q.d12 * thp;
    Interval c1 = Interval(0.5) * imax(imax(b_vwp, b_wwp), imax(b_wpp, b_pps));

    Interval c2 = (Interval(4.0) / Interval(6.0)) * q.a1 * thw;

    return {c0, c1, c2};
}

RadiiResult radii_find_negative(const Interval& Y, const Interval& Z0, const Interval& Z1,
                                const std::array<Interval, 3>& Z2) {
    RadiiResult res;
    Interval slope = Interval(1.0) - (Z0 + Z1);
    auto P_at = [&](double r) {
        Interval ri(r);
        return ((Z2[2] * ri + Z2[1]) * ri + Z2[0]) * sqr(ri) - slope * ri + Y;
    };
    double lo = std::max(Y.hi, 1e-300);
    if (!(lo < 1.0)) return res;
    constexpr int kGrid = 64;
    double llo = std::log(lo), lhi = std::log(1.0);
    for (int i = 0; i < kGrid; ++i) {
        double r = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (kGrid - 1));
        Interval pv = P_at(r);
        if (pv.hi < 0.0) {
            if (!res.found) {
                res.found = true;
                res.r_star = r;
                res.r_min = r;
                res.p_at_r_star = pv;
            }
            res.r_max = r;
        }
    }
    return res;
}

Interval positivity_margin(const RSeq& f, double r) {
    if (f.parity != Parity::cosine) throw ParityMismatch("positivity check expects a cosine sequence");
    // sup |f'| <= 2 sum pi k |f_k|
    Interval lip(0.0);
    Interval pi = ipi();
    for (int k = 1; k < f.len(); ++k) {
        const Interval& fk = f.at(k);
        if (fk.lo == 0.0 && fk.hi == 0.0) continue;
        lip += Interval(2.0) * pi * Interval(static_cast<double>(k)) * iabs(fk);
    }

    auto value_at = [&](double x) {
        Interval acc = f.at(0);
        for (int k = 1; k < f.len(); ++k) {
            const Interval& fk = f.at(k);
            if (fk.lo == 0.0 && fk.hi == 0.0) continue;
            acc += Interval(2.0) * fk * cos_pi(static_cast<double>(k) * x);
        }
        return acc;
    };

    constexpr int kBaseDepth = 10; // 1024 subintervals
    constexpr int kMaxDepth = 24;
    constexpr long kEvalBudget = 200000;
    struct Piece { double a; double h; int depth; };
    std::vector<Piece> stack;
    stack.reserve(2048);
    double h0 = std::ldexp(1.0, -kBaseDepth);
    for (int j = (1 << kBaseDepth) - 1; j >= 0; --j) stack.push_back({j * h0, h0, kBaseDepth});

    double worst = std::numeric_limits<double>::infinity();
    long evals = 0;
    while (!stack.empty()) {
        Piece pc = stack.back();
        stack.pop_back();
        double mid = pc.a + pc.h * 0.5;          // dyadic, exact
        Interval fm = value_at(mid);
        ++evals;
        // a certified point value below r settles failure outright
        double witness = rnd::sub_up(fm.hi, r);
        if (witness < 0.0) return Interval(witness);
        double slack = rnd::mul_up(lip.hi, pc.h * 0.5);
        double bound = rnd::sub_down(rnd::sub_down(fm.lo, slack), r);
        if (bound <= 0.0 && pc.depth < kMaxDepth && evals < kEvalBudget) {
            stack.push_back({pc.a, pc.h * 0.5, pc.depth + 1});
            stack.push_back({pc.a + pc.h * 0.5, pc.h * 0.5, pc.depth + 1});
            continue;
        }
        worst = std::min(worst, bound);
    }
    return Interval(worst);
}

Interval u_error_bound(const SteadyX& X, double r, const Weight& nu) {
    Interval ri(r);
    return (seq_norm(X.w, nu) + seq_norm(X.p, nu)) * ri + sqr(ri) / Interval(4.0);
}

namespace {

bool all_finite(const SteadyCertificate& c) {
    bool ok = c.Y.finite() && c.Z0.finite() && c.Z1.finite();
    for (const auto& z : c.Z2_coeffs) ok = ok && z.finite();
    if (c.radius_found) ok = ok && c.margin_v.finite() && c.margin_w.finite() && c.u_err.finite();
    return ok;
}

} // namespace

SteadyCertificate validate_steady(const SteadyCandidate& cand, const ModelParams& params, int m,
                                  const Weight& nu, const std::string& nu_string) {
    SteadyCertificate cert;
    cert.params = params;
    cert.m = m;
    cert.nu_string = nu_string;
    cert.candidate = cand;

    SteadyX X = promote_candidate(cand, params, m);
    cert.v_at_zero = midpoint(eval_at_zero(X.v));

    SteadyOperators ops = steady_build_operators(X);
    cert.Y = bound_Y_steady(X, ops, nu);
    cert.Z0 = bound_Z0_steady(ops, nu);
    cert.Z1 = bound_Z1_steady(X, ops, nu).total;
    cert.Z2_coeffs = bound_Z2_steady(X, ops, nu);

    RadiiResult rr = radii_find_negative(cert.Y, cert.Z0, cert.Z1, cert.Z2_coeffs);
    cert.radius_found = rr.found;
    if (!rr.found) {
        cert.failure = "no radius with P(r) < 0";
        cert.tainted = !all_finite(cert);
        return cert;
    }
    cert.r_star = rr.r_star;
    cert.r_min = rr.r_min;
    cert.r_max = rr.r_max;
    cert.margin_v = positivity_margin(X.v, rr.r_star);
    cert.margin_w = positivity_margin(X.w, rr.r_star);
    cert.u_err = u_error_bound(X, rr.r_star, nu);
    cert.tainted = !all_finite(cert);

    if (cert.tainted) {
        cert.failure = "overflow tainted the computation";
    } else if (!(cert.margin_v.lo > 0.0)) {
        cert.failure = "positivity of v not certified";
    } else if (!(cert.margin_w.lo > 0.0)) {
        cert.failure = "positivity of w not certified";
    } else {
        cert.valid = true;
    }
    return cert;
}

bool recheck_certificate(const SteadyCertificate& cert, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (cert.tainted) return fail("tainted");
    if (!cert.radius_found) return fail("no verified radius stored");
    Interval ri(cert.r_star);
    Interval slope = Interval(1.0) - (cert.Z0 + cert.Z1);
    Interval pv = ((cert.Z2_coeffs[2] * ri + cert.Z2_coeffs[1]) * ri + cert.Z2_coeffs[0]) * sqr(ri) -
                  slope * ri + cert.Y;
    if (!(pv.hi < 0.0)) return fail("stored bounds do not give P(r) < 0");
    if (!(cert.margin_v.lo > 0.0)) return fail("stored v margin not positive");
    if (!(cert.margin_w.lo > 0.0)) return fail("stored w margin not positive");
    return true;
}

} // namespace crossdiff
