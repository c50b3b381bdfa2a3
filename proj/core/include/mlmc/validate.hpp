#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlmc/constants.hpp"
#include "mlmc/optimize.hpp"
#include "mlmc/simulate.hpp"

namespace mlmc {

struct BoundPoint {
    double grid_value = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

struct BoundSeries {
    std::string quantity;
    std::vector<BoundPoint> points;
    std::optional<double> slope;  // log-log regression where the check fits one
    bool passed = true;
};

// A bound check passes iff empirical - 3*SE <= bound at every grid point
// (tail checks use the Clopper-Pearson 99% upper bound instead; the few
// two-sided/lower series say so in their quantity name).
struct BoundCheckReport {
    std::string bound_name;
    std::vector<BoundSeries> series;
    std::int64_t replications = 0;
    std::uint64_t seed = 0;
    bool passed = true;
    std::vector<std::string> notes;

    void finalize();  // recomputes per-series and overall pass flags
};

// ---- strong error of the coupled pair ----
BoundCheckReport check_strong_error(const ConstantsBundle& k,
                                    const std::vector<std::int64_t>& n_list, std::int64_t paths,
                                    std::uint64_t seed, int workers = 1);

// ---- mean square error of the estimator ----
// Replicates the estimator and compares the empirical mean squared deviation
// from the closed-form mean against the non-asymptotic MSE bound, and the
// empirical RMSE against the target eps when one is given.
BoundCheckReport check_mse(const ConstantsBundle& k, const LevelPlan& plan,
                           std::optional<double> eps, std::int64_t replications, std::uint64_t seed,
                           int workers = 1);

// ---- MGF of the squared coupled max gap ----
BoundCheckReport check_mgf_u(const ConstantsBundle& k, std::int64_t n,
                             const std::vector<double>& rho_fractions, double x, std::int64_t paths,
                             std::uint64_t seed, int workers = 1);

// ---- MGF of the squared Malliavin coupled gap ----
BoundCheckReport check_mgf_malliavin(const ConstantsBundle& k, std::int64_t n, double r, int j,
                                     const std::vector<double>& rho_fractions, std::int64_t paths,
                                     std::uint64_t seed, int workers = 1);

// ---- MGF of the centered estimator ----
// lambda = fraction * scale with scale = script_C * min_l N_l m^l for L >= 1
// and sqrt(N0/T)/lip for the purely Gaussian L = 0 case (where the bound is
// an equality and is additionally checked two-sided).
BoundCheckReport check_estimator_mgf(const ConstantsBundle& k, const LevelPlan& plan,
                                     const std::vector<double>& lambda_fractions,
                                     std::int64_t replications, std::uint64_t seed, int workers = 1);

// ---- concentration of the optimally-tuned estimator ----
// alpha_grid may be empty: alpha_points evenly spaced values up to
// c2 eps^{2/3} (or c5(eps) when boosted) are used. Requires a closed-form
// oracle mean.
BoundCheckReport check_concentration(const ConstantsBundle& k, double eps,
                                     std::vector<double> alpha_grid, std::int64_t replications,
                                     std::uint64_t seed, std::optional<double> boosted_beta = {},
                                     int workers = 1, int alpha_points = 8);

// ---- Orlicz norm ----
// empirical norm: bisection on c solving mean((e^{|x|/c}-1)/(e-1)) = 1
double orlicz_norm(const std::vector<double>& samples, double rel_tol = 1e-10);

BoundCheckReport check_orlicz_bounds(const ConstantsBundle& k, double eps,
                                     std::int64_t replications, std::uint64_t seed, int workers = 1);

// ---- MGF of the squared running maximum of a Brownian path ----
// H == 1, delta = 0, d = 1 specialization; mu = fraction / (8T); the sup is
// taken over a grid of grid_steps points (discretization makes the empirical
// value a slight under-estimate, conservative for the upper-bound check).
BoundCheckReport check_sup_integral_mgf(const std::vector<double>& mu_fractions, double T,
                                        std::int64_t paths, std::int64_t grid_steps,
                                        std::uint64_t seed, int workers = 1);

// Closed-form E f(X_T) for affine/constant drift with a linear payoff;
// nullopt for every other combination.
std::optional<double> oracle_mean(const ProblemSpec& problem, const Payoff& payoff);

// Exact mean of f(X^n_T) for the n-step Euler chain under the same
// restrictions (used for centering and for the true-bias envelope).
std::optional<double> oracle_mean_euler(const ProblemSpec& problem, const Payoff& payoff,
                                        std::int64_t n);

}  // namespace mlmc
