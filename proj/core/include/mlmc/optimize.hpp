#pragma once

#include <functional>

#include "mlmc/constants.hpp"
#include "mlmc/simulate.hpp"

namespace mlmc {

// Cost-optimal MLMC configuration for a target RMSE eps: level count from the
// root of h, total samples from the closed-form allocation, integer counts by
// ceiling (slack of the statistical-error budget recorded).
struct OptimalPlan {
    double eps = 0.0;
    int m = 2;
    int L = 0;
    double N_real = 0.0;              // real-valued total before ceiling
    std::vector<std::int64_t> N;      // per-level counts, size L+1
    double alpha = 0.0;               // sqrt(alpha) = 1 + m(sqrt(m)-1)C13/(m+1)
    double beta_eps = 0.0;            // eps / (lip * T * sqrt(K1_inf))
    double x_star = 0.0;              // root of h (0 on the L = 0 branch)
    double predicted_cost = 0.0;      // Cost(m, m^{-L})
    bool l0_branch = false;           // 2 sqrt(alpha) - 1 - beta^2 <= 0
    double slack13 = 0.0;             // budget slack left by integer ceiling

    LevelPlan plan() const { return LevelPlan{m, L, N}; }
};

struct CostFunctionals {
    double alpha = 0.0;
    double beta_eps = 0.0;
    std::function<double(double)> Cost;  // x = m^{-L}
    std::function<double(double)> g;     // Cost up to an x-free factor; pole at x = beta
    std::function<double(double)> h;     // increasing on (0,1]; sign of g'
};

// |E[f(X_T) - Qhat]| <= lip * T * sqrt(K1_inf) * m^{-L}
double bias_bound(const ConstantsBundle& k, const Payoff& payoff, int L);

// Non-asymptotic mean-square-error bound of the estimator for a given plan.
double mse_bound(const ConstantsBundle& k, const Payoff& payoff, const LevelPlan& plan);

CostFunctionals cost_functionals(const ConstantsBundle& k, const Payoff& payoff, double eps);

OptimalPlan optimal_plan(const ConstantsBundle& k, const Payoff& payoff, double eps);

// Level counts inflated by m^{(l-1)/2} / (m^{(l-1)/2} ^ l^beta); same bias and
// no worse statistical error, wider valid deviation range, cost still O(eps^-2).
struct BoostedPlan {
    LevelPlan plan;
    double cost_ratio = 1.0;  // boosted cost / optimal cost
};
BoostedPlan boosted_plan(const OptimalPlan& optimal, double beta);

// Statistical-error budget (13): returns {lhs, rhs} for a given plan.
struct Budget13 {
    double lhs = 0.0;
    double rhs = 0.0;
};
Budget13 budget13(const ConstantsBundle& k, const Payoff& payoff, const LevelPlan& plan, double eps);

}  // namespace mlmc
