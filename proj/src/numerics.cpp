#include "crossdiff/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crossdiff/lapack.hpp"

namespace crossdiff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::vector<double> midpoints(const RSeq& s, int len) {
    std::vector<double> r(static_cast<size_t>(len), 0.0);
    for (int k = 0; k < s.len() && k < len; ++k) r[static_cast<size_t>(k)] = midpoint(s.at(k));
    return r;
}

// weighted norm of the first m coefficients
double hat_norm(const RSeq& s, int m, double nu) {
    double acc = 0.0, p = 1.0;
    for (int k = 0; k < std::min(m, s.len()); ++k) {
        double a = std::fabs(midpoint(s.at(k)));
        acc += (k == 0) ? a : 2.0 * a * p;
        if (k + 1 < m) p *= nu;
    }
    return acc;
}

SteadyCandidate resize_candidate(const SteadyCandidate& c, int m) {
    SteadyCandidate r;
    r.v = c.v; r.w = c.w; r.p = c.p; r.s = c.s;
    r.v.resize(static_cast<size_t>(m), 0.0);
    r.w.resize(static_cast<size_t>(m), 0.0);
    r.p.resize(static_cast<size_t>(m), 0.0);
    r.s.resize(static_cast<size_t>(m), 0.0);
    return r;
}

double candidate_tail_fraction(const SteadyCandidate& c) {
    auto frac = [](const std::vector<double>& a) {
        if (a.size() < 8) return 0.0;
        double mx = 0.0;
        for (double x : a) mx = std::max(mx, std::fabs(x));
        if (mx == 0.0) return 0.0;
        double tail = 0.0;
        for (size_t k = a.size() - 3; k < a.size(); ++k) tail = std::max(tail, std::fabs(a[k]));
        return tail / mx;
    };
    return std::max(std::max(frac(c.v), frac(c.w)), std::max(frac(c.p), frac(c.s)));
}

} // namespace

ModelParams with_d(const ModelParams& base, double d) {
    ModelParams p = base;
    p.d1 = Interval(d);
    p.d2 = Interval(d);
    p.source[7] = double_to_string(d);
    p.source[8] = double_to_string(d);
    return p;
}

SteadyCandidate equilibrium_candidate(const ModelParams& params) {
    Equilibrium eq = homogeneous_equilibrium(params);
    double v = midpoint(eq.v), u = midpoint(eq.u);
    double dv = midpoint(params.d1) + midpoint(params.d12) * v;
    SteadyCandidate c;
    c.v = {v};
    c.w = {dv * u};
    c.p = {1.0 / dv};
    c.s = {0.0};
    return c;
}

NewtonResult newton_steady(const SteadyCandidate& guess, const ModelParams& params,
                           const NewtonConfig& cfg) {
    int m = cfg.m > 0 ? cfg.m : guess.len();
    if (guess.len() > m) throw DimensionMismatch("newton: guess longer than truncation");
    SteadyCandidate x = resize_candidate(guess, m);

    auto residual_of = [&](const SteadyCandidate& c) {
        SteadyX X = promote_candidate(c, params, m);
        std::array<RSeq, 4> F = steady_eval_F(X);
        double r = 0.0;
        for (const auto& f : F) r += hat_norm(f, m, cfg.nu);
        return r;
    };

    NewtonResult out;
    out.x = x;
    out.residual = residual_of(x);
    for (int it = 0; it < cfg.max_iter; ++it) {
        if (out.residual <= cfg.residual_tol) {
            out.iterations = it;
            if (out.rcond == 0.0)
                out.rcond = lapack::rcond_1(midpoint(steady_DF_hat(promote_candidate(out.x, params, m))));
            return out;
        }
        SteadyX X = promote_candidate(out.x, params, m);
        Mat<double> J = midpoint(steady_DF_hat(X));
        std::array<RSeq, 4> F = steady_eval_F(X);
        std::vector<double> rhs(static_cast<size_t>(4 * m));
        for (int c = 0; c < 4; ++c)
            for (int k = 0; k < m; ++k)
                rhs[static_cast<size_t>(c * m + k)] = -midpoint(F[static_cast<size_t>(c)].at(k));
        if (it == 0) out.rcond = lapack::rcond_1(J);
        if (!lapack::solve(J, rhs)) throw SingularJacobian("newton: singular Jacobian");

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            SteadyCandidate trial = out.x;
            for (int k = 0; k < m; ++k) {
                trial.v[static_cast<size_t>(k)] += step * rhs[static_cast<size_t>(k)];
                trial.w[static_cast<size_t>(k)] += step * rhs[static_cast<size_t>(m + k)];
                trial.p[static_cast<size_t>(k)] += step * rhs[static_cast<size_t>(2 * m + k)];
                trial.s[static_cast<size_t>(k)] += step * rhs[static_cast<size_t>(3 * m + k)];
            }
            double rt = residual_of(trial);
            if (rt < out.residual || rt <= cfg.residual_tol) {
                out.x = trial;
                out.residual = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) throw NoConvergence("newton: residual stagnated at " + double_to_string(out.residual));
    }
    if (out.residual <= cfg.residual_tol) {
        out.iterations = cfg.max_iter;
        return out;
    }
    throw NoConvergence("newton: tolerance not reached, residual " + double_to_string(out.residual));
}

std::vector<BranchPoint> continuation_branch(const BranchPoint& seed, const ModelParams& base,
                                             const ContinuationConfig& cfg) {
    std::vector<BranchPoint> out;
    double dir = (cfg.d_to >= seed.d) ? 1.0 : -1.0;
    double step = std::fabs(cfg.initial_step);

    NewtonConfig ncfg = cfg.newton;
    BranchPoint cur = seed;
    {
        ncfg.m = std::max(cur.candidate.len(), cfg.newton.m);
        NewtonResult nr = newton_steady(cur.candidate, with_d(base, cur.d), ncfg);
        cur.candidate = nr.x;
        cur.residual = nr.residual;
        cur.rcond = nr.rcond;
    }
    out.push_back(cur);
    BranchPoint prev = cur;
    bool have_prev = false;

    while (dir * (cfg.d_to - cur.d) > 1e-15 && static_cast<int>(out.size()) < cfg.max_points) {
        double h = std::min(step, std::fabs(cfg.d_to - cur.d));
        double d_next = cur.d + dir * h;
        // secant prediction
        SteadyCandidate pred = cur.candidate;
        if (have_prev && prev.d != cur.d) {
            double t = (d_next - cur.d) / (cur.d - prev.d);
            SteadyCandidate pv = resize_candidate(prev.candidate, cur.candidate.len());
            for (size_t k = 0; k < pred.v.size(); ++k) {
                pred.v[k] += t * (cur.candidate.v[k] - pv.v[k]);
                pred.w[k] += t * (cur.candidate.w[k] - pv.w[k]);
                pred.p[k] += t * (cur.candidate.p[k] - pv.p[k]);
                pred.s[k] += t * (cur.candidate.s[k] - pv.s[k]);
            }
        }
        int m_work = pred.len();
        if (candidate_tail_fraction(pred) > cfg.tail_fraction && m_work < cfg.m_max)
            m_work = std::min(cfg.m_max, std::max(m_work + 16, (m_work * 4) / 3));
        try {
            ncfg.m = m_work;
            NewtonResult nr = newton_steady(pred, with_d(base, d_next), ncfg);
            prev = cur;
            have_prev = true;
            cur = BranchPoint{d_next, nr.x, nr.residual, nr.rcond};
            out.push_back(cur);
            if (h >= step) step *= 1.3;
        } catch (const Error&) {
            step *= 0.5;
            if (step < cfg.min_step)
                throw StallAtStep("continuation stalled at d = " + double_to_string(cur.d));
        }
    }
    return out;
}

SteadyCandidate mode_perturbed_candidate(const ModelParams& params, int k, double amp) {
    if (k < 1) throw DomainError("perturbation mode must be >= 1");
    SteadyCandidate c = equilibrium_candidate(params);
    double p0 = c.p[0];
    double u0 = c.w[0] * c.p[0];
    double d12 = midpoint(params.d12);
    double vk = 0.5 * amp;
    size_t len = static_cast<size_t>(k + 1);
    c.v.resize(len, 0.0);
    c.w.resize(len, 0.0);
    c.p.resize(len, 0.0);
    c.s.resize(len, 0.0);
    c.v[static_cast<size_t>(k)] = vk;
    c.w[static_cast<size_t>(k)] = d12 * u0 * vk;
    c.p[static_cast<size_t>(k)] = -d12 * p0 * p0 * vk;
    c.s[static_cast<size_t>(k)] = -kPi * k * vk;
    return c;
}

SteadyCandidate mirror_candidate(const SteadyCandidate& c) {
    SteadyCandidate r = c;
    for (size_t k = 1; k < r.v.size(); k += 2) {
        r.v[k] = -r.v[k];
        r.w[k] = -r.w[k];
        r.p[k] = -r.p[k];
    }
    // s(x) = v'(x) picks up the opposite sign pattern
    for (size_t k = 2; k < r.s.size(); k += 2) r.s[k] = -r.s[k];
    return r;
}

SteadyCandidate trace_mode_branch(const ModelParams& base, int k, double seed_d, double target_d,
                                  double amp, int m_final, int m_seed) {
    ModelParams at_seed = with_d(base, seed_d);
    NewtonConfig ncfg;
    ncfg.m = m_seed;
    ncfg.residual_tol = 1e-11;
    // the Newton basin around the bifurcating branch is narrow, so scan
    // amplitudes geometrically on both sides of the requested one
    std::vector<double> ladder{1.0};
    for (double f = 0.8; f > 0.1; f *= 0.8) ladder.push_back(f);
    for (double f = 1.25; f < 8.0; f *= 1.25) ladder.push_back(f);
    NewtonResult seed_res;
    bool seeded = false;
    for (double f : ladder) {
        try {
            seed_res = newton_steady(mode_perturbed_candidate(at_seed, k, amp * f), at_seed, ncfg);
            double vk = std::fabs(seed_res.x.v.size() > static_cast<size_t>(k)
                                      ? seed_res.x.v[static_cast<size_t>(k)]
                                      : 0.0);
            if (vk > 1e-5) { seeded = true; break; }
        } catch (const Error&) {
        }
    }
    if (!seeded)
        throw NoConvergence("could not land on the mode-" + std::to_string(k) +
                            " branch at d = " + double_to_string(seed_d));
    ContinuationConfig ccfg;
    ccfg.d_to = target_d;
    ccfg.initial_step = std::max(std::fabs(seed_d - target_d) / 50.0, 1e-6);
    ccfg.m_max = m_final;
    ccfg.newton = ncfg;
    std::vector<BranchPoint> pts = continuation_branch({seed_d, seed_res.x, 0.0, 0.0}, base, ccfg);
    BranchPoint last = pts.back();
    if (std::fabs(last.d - target_d) > 1e-12)
        throw NoConvergence("continuation stopped before the target d");
    NewtonConfig fin = ncfg;
    fin.m = m_final;
    NewtonResult polished = newton_steady(last.candidate, with_d(base, target_d), fin);
    return polished.x;
}

namespace {

inline double cos_entry(const std::vector<double>& g, int k, int j) {
    auto at = [&](int i) { return (i >= 0 && i < static_cast<int>(g.size())) ? g[static_cast<size_t>(i)] : 0.0; };
    double e = at(std::abs(k - j));
    if (j >= 1) e += at(k + j);
    return e;
}

} // namespace

// The guesses come from the linearization in the primitive (u,v) variables,
//   lambda xi  = ((d1 + d12 v) xi + d12 u eta)'' + (r1 - 2 a1 u - b1 v) xi - b1 u eta
//   lambda eta = d2 eta'' - b2 v xi + (r2 - b2 u - 2 a2 v) eta,
// which is far better conditioned than the p-weighted form used for the
// rigorous bounds; the eigenpairs (xi, eta, lambda) are the same objects.
std::vector<EigenGuess> eigen_guess(const CjEnclosure& cj, int n, int count) {
    std::vector<double> vbar = midpoints(cj.vbar, cj.vbar.len());
    std::vector<double> ubar = midpoints(cj.ubar, cj.ubar.len());
    double d1 = midpoint(cj.params.d1), d2 = midpoint(cj.params.d2), d12 = midpoint(cj.params.d12);
    double r1 = midpoint(cj.params.r1), r2 = midpoint(cj.params.r2);
    double a1 = midpoint(cj.params.a1), a2 = midpoint(cj.params.a2);
    double b1 = midpoint(cj.params.b1), b2 = midpoint(cj.params.b2);

    std::vector<double> diff_u = vbar; // d1 + d12 v
    for (auto& x : diff_u) x *= d12;
    diff_u[0] += d1;
    std::vector<double> diff_uv = ubar; // d12 u
    for (auto& x : diff_uv) x *= d12;
    std::vector<double> react_u(ubar.size(), 0.0); // r1 - 2 a1 u - b1 v
    for (size_t i = 0; i < react_u.size(); ++i)
        react_u[i] = -2.0 * a1 * ubar[i] - b1 * (i < vbar.size() ? vbar[i] : 0.0);
    react_u[0] += r1;
    std::vector<double> cross_u = ubar; // -b1 u
    for (auto& x : cross_u) x *= -b1;
    std::vector<double> cross_v = vbar; // -b2 v
    for (auto& x : cross_v) x *= -b2;
    std::vector<double> react_v(ubar.size(), 0.0); // r2 - b2 u - 2 a2 v
    for (size_t i = 0; i < react_v.size(); ++i)
        react_v[i] = -b2 * ubar[i] - 2.0 * a2 * (i < vbar.size() ? vbar[i] : 0.0);
    react_v[0] += r2;

    Mat<double> M(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        double kap = (kPi * k) * (kPi * k);
        for (int j = 0; j < n; ++j) {
            M(k, j) = -kap * cos_entry(diff_u, k, j) + cos_entry(react_u, k, j);
            M(k, n + j) = -kap * cos_entry(diff_uv, k, j) + cos_entry(cross_u, k, j);
            M(n + k, j) = cos_entry(cross_v, k, j);
            M(n + k, n + j) = cos_entry(react_v, k, j);
        }
        M(n + k, n + k) += -d2 * kap;
    }
    lapack::Eig ge = lapack::geev(M);

    std::vector<int> order;
    for (int j = 0; j < 2 * n; ++j)
        if (std::isfinite(ge.values[static_cast<size_t>(j)].real())) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return ge.values[static_cast<size_t>(a)].real() > ge.values[static_cast<size_t>(b)].real();
    });

    std::vector<EigenGuess> out;
    for (int idx : order) {
        if (static_cast<int>(out.size()) >= count) break;
        EigenGuess g;
        g.lambda = ge.values[static_cast<size_t>(idx)];
        g.xi.resize(static_cast<size_t>(n));
        g.eta.resize(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            g.xi[static_cast<size_t>(k)] = ge.vectors(k, idx);
            g.eta[static_cast<size_t>(k)] = ge.vectors(n + k, idx);
        }
        int k0 = 0;
        double best = 0.0;
        for (int k = 0; k < n; ++k) {
            double a = std::abs(g.xi[static_cast<size_t>(k)]);
            if (a > best) { best = a; k0 = k; }
        }
        if (best == 0.0) continue; // degenerate eigenvector, skip
        g.k0 = k0;
        std::complex<double> s = 1.0 / g.xi[static_cast<size_t>(k0)];
        for (auto& z : g.xi) z *= s;
        for (auto& z : g.eta) z *= s;

        // residual diagnostic in the flat coefficient norm
        EigenX X = promote_eigen_guess(g, n);
        EigenResidual R = eigen_eval_Fbar(X, cj);
        auto flat = [&](const CSeq& sq) {
            double acc = 0.0;
            for (int k = 0; k < sq.len(); ++k) {
                double a = std::abs(midpoint(sq.at(k)));
                acc += (k == 0) ? a : 2.0 * a;
            }
            return acc;
        };
        double xn = flat(X.xi) + flat(X.eta) + std::abs(midpoint(X.lambda));
        double rn = flat(R.xi) + flat(R.eta) + std::abs(midpoint(R.lambda_row));
        g.rel_residual = rn / std::max(xn, 1e-300);
        out.push_back(std::move(g));
    }
    if (out.empty()) throw EigensolverFailure("no finite eigenvalues returned");
    return out;
}

const EigenGuess* pick_unstable(const std::vector<EigenGuess>& guesses,
                                const std::complex<double>* target) {
    const EigenGuess* best = nullptr;
    for (const auto& g : guesses) {
        if (!(g.lambda.real() > 0.0)) continue;
        if (!best) { best = &g; continue; }
        if (target) {
            if (std::abs(g.lambda - *target) < std::abs(best->lambda - *target)) best = &g;
        } else if (g.lambda.real() > best->lambda.real()) {
            best = &g;
        }
    }
    return best;
}

std::vector<std::complex<double>> constant_mode_eigenvalues(const CjEnclosure& cj, int k) {
    auto c0 = [&](int j) { return midpoint(cj.cbar[static_cast<size_t>(j)].at(0)); };
    double kap = (kPi * k) * (kPi * k);
    // det(M_k + lambda N) = 0 with M_k = [[-kap+c3, c4],[c7, -kap+c8]],
    // N = [[c5, c6],[0, c9]]
    std::complex<double> a = c0(4) * c0(8);
    std::complex<double> b = c0(4) * (-kap + c0(7)) + c0(8) * (-kap + c0(2)) - c0(6) * c0(5);
    std::complex<double> cc = (-kap + c0(2)) * (-kap + c0(7)) - c0(3) * c0(6);
    std::complex<double> disc = std::sqrt(b * b - 4.0 * a * cc);
    return {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)};
}

EigenX promote_eigen_guess(const EigenGuess& g, int n) {
    EigenX X;
    X.n = n;
    X.k0 = g.k0;
    X.lambda = CInterval(g.lambda);
    X.xi.parity = Parity::cosine;
    X.eta.parity = Parity::cosine;
    X.xi.c.reserve(g.xi.size());
    X.eta.c.reserve(g.eta.size());
    for (auto z : g.xi) X.xi.c.emplace_back(z);
    for (auto z : g.eta) X.eta.c.emplace_back(z);
    X.xi.c.resize(static_cast<size_t>(n));
    X.eta.c.resize(static_cast<size_t>(n));
    return X;
}

EigenX eigen_polish(const CjEnclosure& cj, const EigenX& start, int n, int iters) {
    EigenX X = start;
    X.n = n;
    X.xi.c.resize(static_cast<size_t>(n));
    X.eta.c.resize(static_cast<size_t>(n));
    for (int it = 0; it < iters; ++it) {
        EigenResidual R = eigen_eval_Fbar(X, cj);
        std::vector<std::complex<double>> rhs(static_cast<size_t>(2 * n + 1));
        for (int k = 0; k < n; ++k) {
            rhs[static_cast<size_t>(k)] = -midpoint(R.xi.at(k));
            rhs[static_cast<size_t>(n + k)] = -midpoint(R.eta.at(k));
        }
        rhs[static_cast<size_t>(2 * n)] = -midpoint(R.lambda_row);
        Mat<std::complex<double>> J = midpoint(eigen_DF_hat(X, cj));
        if (!lapack::solve(std::move(J), rhs)) throw SingularJacobian("eigen polish: singular Jacobian");
        for (int k = 0; k < n; ++k) {
            X.xi.c[static_cast<size_t>(k)] += CInterval(rhs[static_cast<size_t>(k)]);
            X.eta.c[static_cast<size_t>(k)] += CInterval(rhs[static_cast<size_t>(n + k)]);
        }
        X.lambda += CInterval(rhs[static_cast<size_t>(2 * n)]);
    }
    return X;
}

} // namespace crossdiff
