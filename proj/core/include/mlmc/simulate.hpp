#pragma once

#include <cstdint>
#include <vector>

#include "mlmc/constants.hpp"
#include "mlmc/model.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

// MLMC configuration: refinement factor m, top level L, per-level sample
// counts N[0..L].
struct LevelPlan {
    int m = 2;
    int L = 0;
    std::vector<std::int64_t> N;

    void validate() const;
    // N0 + sum_l N_l (m+1) m^{l-1}, the number of scheme grid values computed
    double total_cost() const;
};

// One coupled draw: terminal values of the fine (m*n steps) and coarse
// (n steps) schemes driven by the same Brownian increments, plus the maximum
// gap over the coarse grid.
struct CoupledSample {
    Vec fine_terminal;
    Vec coarse_terminal;
    double max_grid_gap = 0.0;
};

struct LevelStats {
    double mean = 0.0;
    double variance = 0.0;  // sample variance of the coupled differences
    std::int64_t count = 0;
};

struct EstimatorOutput {
    double q_hat = 0.0;
    std::vector<LevelStats> levels;
    double total_cost = 0.0;
    std::uint64_t seed = 0;
};

// Advances the fine scheme with m*n_coarse Gaussian increments and the coarse
// scheme with their m-wise sums. When `record_fine_increments` is non-null the
// m*n_coarse x d increment matrix is stored row-major (memory guard: only
// requested when Malliavin statistics are wanted).
CoupledSample simulate_coupled_terminal(const ProblemSpec& problem, int m, std::int64_t n_coarse,
                                        RngStream& rng,
                                        std::vector<double>* record_fine_increments = nullptr);

// m = infinity variant: couples the n-step Euler scheme with a reference for
// the exact solution. Affine drifts use exact Gaussian transition sampling
// conditioned on the shared increments; other drifts fall back to a nested
// Euler scheme with 512x finer steps.
CoupledSample simulate_reference_coupled(const ProblemSpec& problem, std::int64_t n_coarse,
                                         RngStream& rng);

// Single-level terminal draw of X^{n}_T (used for level 0 and auxiliary runs).
Vec simulate_terminal(const ProblemSpec& problem, std::int64_t n, RngStream& rng);

// The multilevel estimator: level 0 plus telescoped corrections, each level on
// independent streams derived from (seed, level, sample). Deterministic for a
// fixed seed and independent of `workers`.
EstimatorOutput mlmc_estimate(const ProblemSpec& problem, const Payoff& payoff,
                              const LevelPlan& plan, std::uint64_t seed, int workers = 1);

// Exact pathwise derivative of X^n_T with respect to a Brownian perturbation
// at time r in coordinate j, via the product of step Jacobians. `increments`
// is the n x d row-major increment matrix of the n-step scheme. A perturbation
// at r is attributed to the increment [eta_n(r), eta_n(r) + T/n) containing r
// (r = T maps to the last increment), matching the finite-difference check.
Vec malliavin_derivative(const ProblemSpec& problem, std::int64_t n,
                         const std::vector<double>& increments, double r, int j);

// max over the coarse grid of |D_r^j X^{mn}_{t_k} - D_r^j X^n_{t_k}| with both
// schemes re-advanced from the same recorded fine increments.
double malliavin_coupled_gap(const ProblemSpec& problem, int m, std::int64_t n,
                             const std::vector<double>& fine_increments, double r, int j);

}  // namespace mlmc
