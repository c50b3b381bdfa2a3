#include "mlmc/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include "mlmc/numerics.hpp"

namespace mlmc {

double bias_bound(const ConstantsBundle& k, const Payoff& payoff, int L) {
    if (L < 0) throw std::invalid_argument("bias_bound: L >= 0 required");
    const double m = static_cast<double>(k.m().value());
    return payoff.lip() * k.problem().T * std::sqrt(k.K1_inf()) * std::pow(m, -L);
}

double mse_bound(const ConstantsBundle& k, const Payoff& payoff, const LevelPlan& plan) {
    plan.validate();
    if (plan.m != k.m().value()) throw std::invalid_argument("mse_bound: plan/bundle m mismatch");
    const double T = k.problem().T;
    const double f2 = payoff.lip() * payoff.lip();
    const double m = static_cast<double>(plan.m);
    double acc = k.K1_inf() * T * T * std::pow(m, -2.0 * plan.L) + T / static_cast<double>(plan.N[0]);
    for (int l = 1; l <= plan.L; ++l) {
        acc += k.K1m() * (m - 1.0) * T * T /
               (static_cast<double>(plan.N[l]) * std::pow(m, 2.0 * l - 1.0));
    }
    return f2 * acc;
}

CostFunctionals cost_functionals(const ConstantsBundle& k, const Payoff& payoff, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("cost_functionals: eps > 0 required");
    const double m = static_cast<double>(k.m().value());
    const double T = k.problem().T;
    const double f = payoff.lip();
    const double C13 = k.C13();
    const double K1m = k.K1m();
    const double K1inf = k.K1_inf();
    const double sqrt_alpha = 1.0 + k.gamma1();
    const double beta = eps / (f * T * std::sqrt(K1inf));

    CostFunctionals out;
    out.alpha = sqrt_alpha * sqrt_alpha;
    out.beta_eps = beta;
    out.Cost = [=](double x) {
        if (!(x > 0.0)) throw std::domain_error("Cost: x > 0 required");
        const double denom = eps * eps - f * f * T * T * K1inf * x * x;
        if (!(denom > 0.0)) throw std::domain_error("Cost: bias constraint violated (x >= beta)");
        const double lead = C13 + (m + 1.0) / m * (1.0 - std::sqrt(x)) / (std::sqrt(m) - 1.0);
        return lead * lead * K1m * m * m * (m - 1.0) * f * f * T * T / ((m + 1.0) * denom);
    };
    out.g = [=](double x) {
        if (!(x > 0.0) || x >= beta) throw std::domain_error("g: 0 < x < beta required (pole at beta)");
        const double num = sqrt_alpha - std::sqrt(x);
        return num * num / (beta * beta - x * x);
    };
    out.h = [=](double x) {
        if (!(x > 0.0)) throw std::domain_error("h: x > 0 required");
        return 2.0 * sqrt_alpha * x - std::pow(x, 1.5) - beta * beta / std::sqrt(x);
    };
    return out;
}

Budget13 budget13(const ConstantsBundle& k, const Payoff& payoff, const LevelPlan& plan, double eps) {
    plan.validate();
    const double m = static_cast<double>(plan.m);
    const double T = k.problem().T;
    const double f = payoff.lip();
    Budget13 b;
    b.lhs = k.C13() * k.C13() / static_cast<double>(plan.N[0]);
    for (int l = 1; l <= plan.L; ++l)
        b.lhs += (m + 1.0) / (static_cast<double>(plan.N[l]) * std::pow(m, 2.0 * l + 1.0));
    b.rhs = (m + 1.0) / (k.K1m() * m * m * (m - 1.0)) *
            (eps * eps / (f * f * T * T) - k.K1_inf() * std::pow(m, -2.0 * plan.L));
    return b;
}

OptimalPlan optimal_plan(const ConstantsBundle& k, const Payoff& payoff, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("optimal_plan: eps > 0 required");
    const int mi = k.m().value();
    const double m = static_cast<double>(mi);
    const double T = k.problem().T;
    const double f = payoff.lip();
    const double C13 = k.C13();
    const double K1m = k.K1m();
    const double K1inf = k.K1_inf();

    CostFunctionals fn = cost_functionals(k, payoff, eps);
    const double sqrt_alpha = std::sqrt(fn.alpha);
    const double beta = fn.beta_eps;

    OptimalPlan out;
    out.eps = eps;
    out.m = mi;
    out.alpha = fn.alpha;
    out.beta_eps = beta;

    if (2.0 * sqrt_alpha - 1.0 - beta * beta <= 0.0) {
        // beta > 1: the cost is minimized at x = 1, no refinement needed
        out.l0_branch = true;
        out.L = 0;
        out.x_star = 0.0;
    } else {
        const double x_lo = std::pow(beta, 4.0 / 3.0) / (std::pow(2.0, 2.0 / 3.0) * std::cbrt(fn.alpha));
        const double x_hi = x_lo + beta * beta / (2.0 * sqrt_alpha) / (2.0 * sqrt_alpha - 1.5);
        const double h_lo = fn.h(x_lo);
        const double h_hi = fn.h(x_hi);
        if (!(h_lo <= 0.0) || !(h_hi >= 0.0))
            throw std::logic_error("optimal_plan: h-root bracket failed to contain a sign change");
        out.x_star = bisect_root(fn.h, x_lo, x_hi, 1e-12);

        const double l_real = -std::log(out.x_star) / std::log(m);
        const int l_floor = std::max(0, static_cast<int>(std::floor(l_real)));
        const int l_ceil = std::max(0, static_cast<int>(std::ceil(l_real)));
        // floor candidate first, so an exact tie keeps the smaller (cheaper) L
        double best_g = 0.0;
        int best_l = -1;
        for (int cand : {l_floor, l_ceil}) {
            const double x = std::pow(m, -cand);
            if (!(x < beta)) continue;  // bias constraint m^{-L} < beta
            const double gval = fn.g(x);
            if (best_l < 0 || gval < best_g) {
                best_g = gval;
                best_l = cand;
            }
        }
        if (best_l < 0) throw std::logic_error("optimal_plan: no feasible level candidate");
        out.L = best_l;
    }

    // total sample count achieving equality in the statistical budget
    const double mL = std::pow(m, -out.L);
    double s32 = 0.0;
    for (int l = 1; l <= out.L; ++l) s32 += std::pow(m, -1.5 * l);
    const double denom = eps * eps - f * f * T * T * K1inf * mL * mL;
    if (!(denom > 0.0)) throw std::logic_error("optimal_plan: infeasible bias at chosen L");
    const double N = (C13 + s32) *
                     (C13 + (m + 1.0) / m * (1.0 - std::pow(m, -out.L / 2.0)) / (std::sqrt(m) - 1.0)) *
                     K1m * m * m * (m - 1.0) * f * f * T * T / ((m + 1.0) * denom);
    out.N_real = N;
    out.N.resize(out.L + 1);
    out.N[0] = static_cast<std::int64_t>(std::ceil(N * C13 / (C13 + s32)));
    for (int l = 1; l <= out.L; ++l)
        out.N[l] = static_cast<std::int64_t>(std::ceil(N * std::pow(m, -1.5 * l) / (C13 + s32)));
    for (auto& c : out.N) c = std::max<std::int64_t>(c, 1);

    out.predicted_cost = fn.Cost(mL);
    const Budget13 b = budget13(k, payoff, out.plan(), eps);
    out.slack13 = b.rhs - b.lhs;
    return out;
}

BoostedPlan boosted_plan(const OptimalPlan& optimal, double beta) {
    if (!(beta > 1.0)) throw std::invalid_argument("boosted_plan: beta > 1 required");
    BoostedPlan out;
    out.plan.m = optimal.m;
    out.plan.L = optimal.L;
    out.plan.N = optimal.N;
    const double m = static_cast<double>(optimal.m);
    for (int l = 1; l <= optimal.L; ++l) {
        const double half_pow = std::pow(m, (l - 1) / 2.0);
        const double factor = half_pow / std::min(half_pow, std::pow(static_cast<double>(l), beta));
        out.plan.N[l] =
            static_cast<std::int64_t>(std::ceil(static_cast<double>(optimal.N[l]) * factor));
    }
    const double base_cost = optimal.plan().total_cost();
    out.cost_ratio = out.plan.total_cost() / base_cost;
    return out;
}

}  // namespace mlmc
