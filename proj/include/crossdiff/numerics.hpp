#ifndef CROSSDIFF_NUMERICS_HPP
#define CROSSDIFF_NUMERICS_HPP

#include <complex>
#include <vector>

#include "crossdiff/eigenproblem.hpp"
#include "crossdiff/steady.hpp"

namespace crossdiff {

struct NewtonConfig {
    int m = 0;                    // working truncation (0: keep candidate length)
    double residual_tol = 1e-12;  // weighted norm of the truncated residual
    int max_iter = 30;
    int max_halvings = 5;         // step damping on residual growth
    double nu = 1.06;             // weight for the residual norm
};

struct NewtonResult {
    SteadyCandidate x;
    double residual = 0.0;
    int iterations = 0;
    double rcond = 0.0;
};

// Newton iteration on the truncated map; floating point throughout (the
// interval evaluation/assembly collapsed to midpoints). Throws NoConvergence
// or SingularJacobian.
NewtonResult newton_steady(const SteadyCandidate& guess, const ModelParams& params,
                           const NewtonConfig& cfg);

// Same parameter set with d1 = d2 = d.
ModelParams with_d(const ModelParams& base, double d);

SteadyCandidate equilibrium_candidate(const ModelParams& params);

struct BranchPoint {
    double d = 0.0;
    SteadyCandidate candidate;
    double residual = 0.0;
    double rcond = 0.0;
};

struct ContinuationConfig {
    double d_to = 0.0;
    double initial_step = 1e-3;   // magnitude; direction from d_to
    double min_step = 1e-7;
    int max_points = 4000;
    double tail_fraction = 1e-9;  // grow m when the last modes carry more than this
    int m_max = 600;
    NewtonConfig newton;
};

// Natural-parameter continuation with a secant predictor, Newton corrector,
// step halving on failure and automatic truncation growth. Emits every
// converged point; throws StallAtStep when the step underflows before d_to
// is reached (points found so far are lost to the caller only on throw, so
// the sweep collects them in `out` as it goes).
std::vector<BranchPoint> continuation_branch(const BranchPoint& seed, const ModelParams& base,
                                             const ContinuationConfig& cfg);

// Equilibrium perturbed along cosine mode k, with w, p, s adjusted
// consistently; used to jump onto the mode-k bifurcating branch.
SteadyCandidate mode_perturbed_candidate(const ModelParams& params, int k, double amp);

inline SteadyCandidate k1_perturbed_candidate(const ModelParams& params, double amp) {
    return mode_perturbed_candidate(params, 1, amp);
}

// Seed the mode-k branch at seed_d (scanning amplitudes around amp when
// Newton falls back to the constant state), continue to target_d, and
// re-converge at m_final. amp's sign selects the branch half.
SteadyCandidate trace_mode_branch(const ModelParams& base, int k, double seed_d, double target_d,
                                  double amp, int m_final, int m_seed);

inline SteadyCandidate trace_k1_branch(const ModelParams& base, double seed_d, double target_d,
                                       double amp, int m_final, int m_seed) {
    return trace_mode_branch(base, 1, seed_d, target_d, amp, m_final, m_seed);
}

// x -> 1-x reflection: flips the sign of odd cosine modes and even sine modes.
SteadyCandidate mirror_candidate(const SteadyCandidate& c);

struct EigenGuess {
    std::vector<std::complex<double>> xi, eta;
    std::complex<double> lambda;
    int k0 = 0;
    double rel_residual = 0.0; // |Fbar(X)|_1 / |X|_1, all coefficients
};

// Leading eigenpairs (largest real part) of the discretized linearization,
// normalized so that the largest xi coefficient is 1 at its index k0.
std::vector<EigenGuess> eigen_guess(const CjEnclosure& cj, int n, int count);

// Choose among eigenpairs with positive real part: nearest to `target` when
// given, otherwise the largest real part. Null when none is unstable.
const EigenGuess* pick_unstable(const std::vector<EigenGuess>& guesses,
                                const std::complex<double>* target = nullptr);

// Closed-form per-mode eigenvalues when all coefficients are constants
// (homogeneous steady state): for each k the 2x2 pencil gives two roots.
std::vector<std::complex<double>> constant_mode_eigenvalues(const CjEnclosure& cj, int k);

EigenX promote_eigen_guess(const EigenGuess& g, int n);

// Newton refinement of an eigenpair on the truncated explicit map at a
// (typically larger) truncation n; keeps the normalization index.
EigenX eigen_polish(const CjEnclosure& cj, const EigenX& start, int n, int iters = 3);

} // namespace crossdiff

#endif
