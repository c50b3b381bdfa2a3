#include "mlmc/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mlmc/numerics.hpp"

namespace mlmc {

namespace {

void parallel_fill(std::int64_t total, int workers, const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1 || total < 2) {
        for (std::int64_t i = 0; i < total; ++i) fn(i);
        return;
    }
    const int w = static_cast<int>(std::min<std::int64_t>(workers, total));
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (int t = 0; t < w; ++t) {
        const std::int64_t b = total * t / w;
        const std::int64_t e = total * (t + 1) / w;
        threads.emplace_back([&fn, b, e]() {
            for (std::int64_t i = b; i < e; ++i) fn(i);
        });
    }
    for (auto& th : threads) th.join();
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    double max_term = 0.0;
    double sum = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) {
        s += x;
        out.max_term = std::max(out.max_term, x);
    }
    out.sum = s;
    out.mean = s / n;
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    const double var = (v.size() > 1) ? ss / (n - 1.0) : 0.0;
    out.se = std::sqrt(var / n);
    return out;
}

bool one_sided_ok(const MeanSe& m, double bound) { return m.mean - 3.0 * m.se <= bound; }

double saturating_exp(double arg) { return arg > 690.0 ? 1e300 : std::exp(arg); }

std::int64_t ipow64(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

void BoundCheckReport::finalize() {
    passed = true;
    for (auto& s : series) {
        s.passed = true;
        for (const auto& p : s.points) s.passed = s.passed && p.satisfied;
        passed = passed && s.passed;
    }
}

BoundCheckReport check_strong_error(const ConstantsBundle& k,
                                    const std::vector<std::int64_t>& n_list, std::int64_t paths,
                                    std::uint64_t seed, int workers) {
    if (paths < 1000) throw std::invalid_argument("check_strong_error: paths >= 1000 required");
    if (n_list.empty()) throw std::invalid_argument("check_strong_error: empty n grid");
    const ProblemSpec& problem = k.problem();
    const double T = problem.T;
    const double r1 = k.m().frac_m_minus_1_over_m();

    BoundCheckReport rep;
    rep.bound_name = "strong_error";
    rep.replications = paths;
    rep.seed = seed;
    BoundSeries terminal{"E|U_T|^2", {}, {}, true};
    BoundSeries running_max{"E|U*_T|^2", {}, {}, true};

    std::vector<double> log_n, log_mean;
    for (size_t idx = 0; idx < n_list.size(); ++idx) {
        const std::int64_t n = n_list[idx];
        std::vector<double> term_sq(static_cast<size_t>(paths));
        std::vector<double> max_sq(static_cast<size_t>(paths));
        parallel_fill(paths, workers, [&](std::int64_t p) {
            RngStream rng(seed, rng_domain::kValidation,
                          (static_cast<std::uint64_t>(idx) << 40) | static_cast<std::uint64_t>(p));
            const CoupledSample s =
                k.m().is_infinite() ? simulate_reference_coupled(problem, n, rng)
                                    : simulate_coupled_terminal(problem, k.m().value(), n, rng);
            double g = 0.0;
            for (int i = 0; i < problem.d; ++i) {
                const double diff = s.fine_terminal[i] - s.coarse_terminal[i];
                g += diff * diff;
            }
            term_sq[static_cast<size_t>(p)] = g;
            max_sq[static_cast<size_t>(p)] = s.max_grid_gap * s.max_grid_gap;
        });
        const double nn = static_cast<double>(n);
        const MeanSe mt = mean_se(term_sq);
        const MeanSe mm = mean_se(max_sq);
        const double bound1 = k.K1m() * r1 * T * T / (nn * nn);
        const double bound2 = k.K2m() * r1 * T * T / (nn * nn);
        terminal.points.push_back({nn, mt.mean, mt.se, bound1, one_sided_ok(mt, bound1)});
        running_max.points.push_back({nn, mm.mean, mm.se, bound2, one_sided_ok(mm, bound2)});
        if (mt.mean > 0.0) {
            log_n.push_back(std::log(nn));
            log_mean.push_back(std::log(mt.mean));
        }
    }
    if (log_n.size() >= 2) terminal.slope = fit_line(log_n, log_mean).slope;
    rep.series = {std::move(terminal), std::move(running_max)};
    rep.finalize();
    return rep;
}

BoundCheckReport check_mse(const ConstantsBundle& k, const LevelPlan& plan,
                           std::optional<double> eps, std::int64_t replications, std::uint64_t seed,
                           int workers) {
    plan.validate();
    const ProblemSpec& problem = k.problem();
    const Payoff& payoff = k.payoff();
    const auto oracle = oracle_mean(problem, payoff);
    if (!oracle)
        throw std::invalid_argument("check_mse: closed-form E f(X_T) unavailable for this drift/payoff");

    std::vector<double> sq(static_cast<size_t>(replications));
    parallel_fill(replications, workers, [&](std::int64_t rix) {
        const std::uint64_t s = derive_seed(seed, rng_domain::kReplication, std::uint64_t(rix));
        const double q = mlmc_estimate(problem, payoff, plan, s, 1).q_hat;
        sq[static_cast<size_t>(rix)] = (q - *oracle) * (q - *oracle);
    });
    const MeanSe ms = mean_se(sq);
    const double bound = mse_bound(k, payoff, plan);

    BoundCheckReport rep;
    rep.bound_name = "mse";
    rep.replications = replications;
    rep.seed = seed;
    BoundSeries mse_series{"E(Qhat - Ef)^2 vs MSE bound", {}, {}, true};
    mse_series.points.push_back(
        {static_cast<double>(plan.L), ms.mean, ms.se, bound, one_sided_ok(ms, bound)});
    rep.series.push_back(std::move(mse_series));
    if (eps) {
        BoundSeries target{"empirical RMSE vs eps", {}, {}, true};
        const double rmse = std::sqrt(ms.mean);
        target.points.push_back({*eps, rmse, ms.se / (2.0 * std::max(rmse, 1e-300)), *eps,
                                 rmse <= *eps});
        rep.series.push_back(std::move(target));
    }
    rep.notes.push_back("oracle mean = " + fmt(*oracle));
    rep.finalize();
    return rep;
}

BoundCheckReport check_mgf_u(const ConstantsBundle& k, std::int64_t n,
                             const std::vector<double>& rho_fractions, double x, std::int64_t paths,
                             std::uint64_t seed, int workers) {
    if (n < 1) throw std::invalid_argument("check_mgf_u: n >= 1 required");
    for (double f : rho_fractions)
        if (f < 0.0 || f > 1.0)
            throw std::invalid_argument("check_mgf_u: fractions must lie in [0, 1]");
    const ProblemSpec& problem = k.problem();
    const double T = problem.T;
    const double r1 = k.m().frac_m_minus_1_over_m();
    const double nn = static_cast<double>(n);
    const double shift = r1 * T * T * x / (2.0 * nn);
    const double rho_max = k.rho17() * nn * nn;

    std::vector<double> gap(static_cast<size_t>(paths));
    parallel_fill(paths, workers, [&](std::int64_t p) {
        RngStream rng(seed, rng_domain::kValidation, static_cast<std::uint64_t>(p));
        const CoupledSample s = k.m().is_infinite()
                                    ? simulate_reference_coupled(problem, n, rng)
                                    : simulate_coupled_terminal(problem, k.m().value(), n, rng);
        gap[static_cast<size_t>(p)] = s.max_grid_gap;
    });

    BoundCheckReport rep;
    rep.bound_name = "mgf_u";
    rep.replications = paths;
    rep.seed = seed;
    BoundSeries series{"E exp(rho (shift + U*)^2)", {}, {}, true};
    std::vector<double> vals(gap.size());
    for (double frac : rho_fractions) {
        const double rho = frac * rho_max;
        for (size_t i = 0; i < gap.size(); ++i)
            vals[i] = std::exp(rho * (shift + gap[i]) * (shift + gap[i]));
        const MeanSe ms = mean_se(vals);
        const double bound = k.mgf_gap_bound(rho, n, x);
        series.points.push_back({frac, ms.mean, ms.se, bound, one_sided_ok(ms, bound)});
        if (ms.max_term > 0.5 * ms.sum && gap.size() > 100)
            rep.notes.push_back("rho fraction " + fmt(frac) +
                                ": MGF estimate dominated by a single path; increase paths");
    }
    rep.series = {std::move(series)};
    rep.finalize();
    return rep;
}

BoundCheckReport check_mgf_malliavin(const ConstantsBundle& k, std::int64_t n, double r, int j,
                                     const std::vector<double>& rho_fractions, std::int64_t paths,
                                     std::uint64_t seed, int workers) {
    if (k.m().is_infinite())
        throw std::invalid_argument("check_mgf_malliavin: finite m required");
    if (!(r >= 0.0 && r < k.problem().T))
        throw std::invalid_argument("check_mgf_malliavin: r in [0, T) required");
    for (double f : rho_fractions)
        if (f < 0.0 || f > 1.0)
            throw std::invalid_argument("check_mgf_malliavin: fractions must lie in [0, 1]");
    const ProblemSpec& problem = k.problem();
    const int m = k.m().value();
    const double rho_max = k.malliavin_rho_max(r, n);

    std::vector<double> gap(static_cast<size_t>(paths));
    parallel_fill(paths, workers, [&](std::int64_t p) {
        RngStream rng(seed, rng_domain::kValidation, static_cast<std::uint64_t>(p));
        std::vector<double> increments;
        (void)simulate_coupled_terminal(problem, m, n, rng, &increments);
        gap[static_cast<size_t>(p)] = malliavin_coupled_gap(problem, m, n, increments, r, j);
    });

    BoundCheckReport rep;
    rep.bound_name = "mgf_malliavin";
    rep.replications = paths;
    rep.seed = seed;
    BoundSeries series{"E exp(rho (DU*)^2)", {}, {}, true};
    std::vector<double> vals(gap.size());
    for (double frac : rho_fractions) {
        const double rho = frac * rho_max;
        for (size_t i = 0; i < gap.size(); ++i) vals[i] = std::exp(rho * gap[i] * gap[i]);
        const MeanSe ms = mean_se(vals);
        const double bound = k.malliavin_mgf_bound(rho, r, n);
        series.points.push_back({frac, ms.mean, ms.se, bound, one_sided_ok(ms, bound)});
        if (ms.max_term > 0.5 * ms.sum && gap.size() > 100)
            rep.notes.push_back("rho fraction " + fmt(frac) +
                                ": MGF estimate dominated by a single path; increase paths");
    }
    rep.series = {std::move(series)};
    rep.finalize();
    return rep;
}

BoundCheckReport check_estimator_mgf(const ConstantsBundle& k, const LevelPlan& plan,
                                     const std::vector<double>& lambda_fractions,
                                     std::int64_t replications, std::uint64_t seed, int workers) {
    plan.validate();
    if (plan.m != k.m().value())
        throw std::invalid_argument("check_estimator_mgf: plan/bundle m mismatch");
    for (double f : lambda_fractions)
        if (f < -1.0 || f > 1.0)
            throw std::invalid_argument("check_estimator_mgf: fractions must lie in [-1, 1]");
    const ProblemSpec& problem = k.problem();
    const Payoff& payoff = k.payoff();
    const double T = problem.T;
    const double f = payoff.lip();
    const double m = static_cast<double>(plan.m);

    BoundCheckReport rep;
    rep.bound_name = "mgf_estimator";
    rep.replications = replications;
    rep.seed = seed;

    // centering at E f(X^{m^L}_T): closed form when available, otherwise an
    // auxiliary single-level run with 10x the replication budget
    const std::int64_t n_top = ipow64(plan.m, plan.L);
    double center;
    double center_se = 0.0;
    if (auto exact = oracle_mean_euler(problem, payoff, n_top)) {
        center = *exact;
        rep.notes.push_back("centering: closed-form Euler-chain mean " + fmt(center));
    } else {
        const std::int64_t aux = 10 * replications;
        std::vector<double> vals(static_cast<size_t>(aux));
        parallel_fill(aux, workers, [&](std::int64_t p) {
            RngStream rng(seed, rng_domain::kValidation, (std::uint64_t(1) << 48) | std::uint64_t(p));
            vals[static_cast<size_t>(p)] = payoff(simulate_terminal(problem, n_top, rng));
        });
        const MeanSe ms = mean_se(vals);
        center = ms.mean;
        center_se = ms.se;
        rep.notes.push_back("centering: auxiliary MC mean " + fmt(center) + " (se " + fmt(center_se) +
                            ", folded into the verdict margin)");
    }

    // statistical half-variance of the MGF bound
    double v_half = T / (2.0 * static_cast<double>(plan.N[0]));
    for (int l = 1; l <= plan.L; ++l)
        v_half += k.C50() * (m - 1.0) * T * T /
                  (static_cast<double>(plan.N[l]) * std::pow(m, 2.0 * l - 1.0));

    double scale;
    if (plan.L >= 1) {
        double min_nm = 0.0;
        for (int l = 1; l <= plan.L; ++l) {
            const double nm = static_cast<double>(plan.N[l]) * std::pow(m, l);
            if (l == 1 || nm < min_nm) min_nm = nm;
        }
        scale = k.script_C() * min_nm;
        rep.notes.push_back("lambda scale = script_C * min_l N_l m^l = " + fmt(scale));
    } else {
        scale = std::sqrt(static_cast<double>(plan.N[0]) / T) / f;
        rep.notes.push_back("L = 0 Gaussian case: lambda scale = sqrt(N0/T)/lip = " + fmt(scale));
    }

    std::vector<double> qs(static_cast<size_t>(replications));
    parallel_fill(replications, workers, [&](std::int64_t rix) {
        const std::uint64_t s = derive_seed(seed, rng_domain::kReplication, std::uint64_t(rix));
        qs[static_cast<size_t>(rix)] = mlmc_estimate(problem, payoff, plan, s, 1).q_hat;
    });

    BoundSeries bound_series{"E exp(lambda (Qhat - center))", {}, {}, true};
    BoundSeries equality_series{"gaussian equality |emp - exp(lambda^2 f^2 T/(2 N0))| <= 3SE", {}, {},
                                true};
    std::vector<double> vals(qs.size());
    for (double frac : lambda_fractions) {
        const double lambda = frac * scale;
        for (size_t i = 0; i < qs.size(); ++i) vals[i] = std::exp(lambda * (qs[i] - center));
        const MeanSe ms = mean_se(vals);
        const double bound = saturating_exp(lambda * lambda * f * f * v_half);
        const double margin = std::exp(3.0 * std::fabs(lambda) * center_se);
        bound_series.points.push_back(
            {frac, ms.mean, ms.se, bound * margin, ms.mean - 3.0 * ms.se <= bound * margin});
        if (plan.L == 0 && center_se == 0.0) {
            const bool ok = std::fabs(ms.mean - bound) <= 3.0 * ms.se;
            equality_series.points.push_back({frac, ms.mean, ms.se, bound, ok});
        }
    }
    rep.series.push_back(std::move(bound_series));
    if (!equality_series.points.empty()) rep.series.push_back(std::move(equality_series));
    rep.finalize();
    return rep;
}

BoundCheckReport check_concentration(const ConstantsBundle& k, double eps,
                                     std::vector<double> alpha_grid, std::int64_t replications,
                                     std::uint64_t seed, std::optional<double> boosted_beta,
                                     int workers, int alpha_points) {
    const ProblemSpec& problem = k.problem();
    const Payoff& payoff = k.payoff();
    const auto oracle = oracle_mean(problem, payoff);
    if (!oracle)
        throw std::invalid_argument(
            "check_concentration: closed-form E f(X_T) unavailable for this drift/payoff");

    const OptimalPlan opt = optimal_plan(k, payoff, eps);
    LevelPlan plan = opt.plan();
    if (boosted_beta) plan = boosted_plan(opt, *boosted_beta).plan;

    const double c2 = k.c2();
    const double c3 = k.c3();
    const double c4 = k.c4();
    const double alpha_max = boosted_beta ? k.c5(eps, *boosted_beta) : c2 * std::pow(eps, 2.0 / 3.0);
    if (alpha_points < 1) throw std::invalid_argument("check_concentration: alpha_points >= 1");
    if (alpha_grid.empty()) {
        for (int i = 1; i <= alpha_points; ++i)
            alpha_grid.push_back(alpha_max * i / static_cast<double>(alpha_points));
    }

    BoundCheckReport rep;
    rep.bound_name = boosted_beta ? "concentration_boosted" : "concentration";
    rep.replications = replications;
    rep.seed = seed;
    {
        std::ostringstream os;
        os << "plan: L=" << plan.L << " N=[";
        for (size_t i = 0; i < plan.N.size(); ++i) os << (i ? "," : "") << plan.N[i];
        os << "] oracle mean=" << *oracle << " alpha_max=" << alpha_max;
        rep.notes.push_back(os.str());
    }
    if (!(eps < k.c1()))
        rep.notes.push_back("eps >= c1: simplified tail bound not asserted at this precision");

    std::vector<double> dev(static_cast<size_t>(replications));
    parallel_fill(replications, workers, [&](std::int64_t rix) {
        const std::uint64_t s = derive_seed(seed, rng_domain::kReplication, std::uint64_t(rix));
        dev[static_cast<size_t>(rix)] =
            std::fabs(mlmc_estimate(problem, payoff, plan, s, 1).q_hat - *oracle);
    });

    // full-plan bound: 2 exp(-(alpha - bias)_+^2 / (2w)), switching to the
    // linear regime beyond alpha_lim
    const double T = problem.T;
    const double f = payoff.lip();
    const double m = static_cast<double>(plan.m);
    const double bias = bias_bound(k, payoff, plan.L);
    double w = f * f * T / static_cast<double>(plan.N[0]);
    for (int l = 1; l <= plan.L; ++l)
        w += f * f * 2.0 * k.C50() * (m - 1.0) * T * T /
             (static_cast<double>(plan.N[l]) * std::pow(m, 2.0 * l - 1.0));
    double alpha_lim = std::numeric_limits<double>::infinity();
    double cmin = 0.0;
    if (plan.L >= 1) {
        double min_nm = 0.0;
        for (int l = 1; l <= plan.L; ++l) {
            const double nm = static_cast<double>(plan.N[l]) * std::pow(m, l);
            if (l == 1 || nm < min_nm) min_nm = nm;
        }
        cmin = k.script_C() * min_nm;
        alpha_lim = w * cmin + bias;
    }

    BoundSeries full{"P(|Qhat - Ef| >= alpha) vs full-plan bound (CP99 upper)", {}, {}, true};
    BoundSeries simplified{"P(|Qhat - Ef| >= alpha) vs simplified bound (CP99 upper)", {}, {}, true};
    const double simp_factor = std::exp(std::min(2.0 / c3, c4 * std::pow(eps, 2.0 / 3.0)));
    for (double alpha : alpha_grid) {
        std::int64_t hits = 0;
        for (double v : dev)
            if (v >= alpha) ++hits;
        const double phat = static_cast<double>(hits) / static_cast<double>(replications);
        const double se = std::sqrt(phat * (1.0 - phat) / static_cast<double>(replications));
        const double cp = clopper_pearson_upper(hits, replications, 0.99);

        double bound_full;
        if (alpha <= alpha_lim) {
            const double num = std::max(alpha - bias, 0.0);
            bound_full = 2.0 * std::exp(-num * num / (2.0 * w));
        } else {
            bound_full = 2.0 * std::exp(-cmin * alpha / 2.0);
        }
        full.points.push_back({alpha, cp, se, bound_full, cp <= bound_full});

        const double bound_simpl = 2.0 * std::exp(-alpha * alpha / (c3 * eps * eps)) * simp_factor;
        simplified.points.push_back({alpha, cp, se, bound_simpl, cp <= bound_simpl});
    }
    rep.series = {std::move(full), std::move(simplified)};
    rep.finalize();
    return rep;
}

double orlicz_norm(const std::vector<double>& samples, double rel_tol) {
    if (samples.empty()) throw std::invalid_argument("orlicz_norm: empty sample set");
    double amax = 0.0;
    for (double s : samples) amax = std::max(amax, std::fabs(s));
    if (amax == 0.0) return 0.0;

    const double em1 = std::numbers::e - 1.0;
    auto excess = [&](double c) {  // mean Psi_e(|x|/c) - 1, decreasing in c
        double acc = 0.0;
        for (double s : samples) {
            const double a = std::fabs(s) / c;
            acc += (a > 700.0) ? 1e300 : std::expm1(a) / em1;
        }
        return acc / static_cast<double>(samples.size()) - 1.0;
    };
    // mean Psi_e(|x|/amax) <= Psi_e(1) = 1, so amax is always an upper bracket
    double hi = amax;
    if (excess(hi) >= 0.0) return hi;  // all samples equal in magnitude
    double lo = hi;
    while (excess(lo) < 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) return 0.0;
    }
    return bisect_root(excess, lo, 2.0 * lo >= hi ? hi : 2.0 * lo, rel_tol);
}

BoundCheckReport check_orlicz_bounds(const ConstantsBundle& k, double eps,
                                     std::int64_t replications, std::uint64_t seed, int workers) {
    const ProblemSpec& problem = k.problem();
    const Payoff& payoff = k.payoff();
    const auto oracle = oracle_mean(problem, payoff);
    if (!oracle)
        throw std::invalid_argument(
            "check_orlicz_bounds: closed-form E f(X_T) unavailable for this drift/payoff");

    BoundCheckReport rep;
    rep.bound_name = "orlicz";
    rep.replications = replications;
    rep.seed = seed;

    const double window = std::min(std::pow(k.c6_prime() * k.c7(), 3.0), k.c1());
    if (!(eps <= window))
        rep.notes.push_back("validity window violated: eps = " + fmt(eps) + " > " + fmt(window) +
                            " = (c6' c7)^3 ^ c1; check run informationally");

    const OptimalPlan opt = optimal_plan(k, payoff, eps);
    const LevelPlan plan = opt.plan();

    std::vector<double> dev(static_cast<size_t>(replications));
    parallel_fill(replications, workers, [&](std::int64_t rix) {
        const std::uint64_t s = derive_seed(seed, rng_domain::kReplication, std::uint64_t(rix));
        dev[static_cast<size_t>(rix)] = mlmc_estimate(problem, payoff, plan, s, 1).q_hat - *oracle;
    });
    const double norm_mlmc = orlicz_norm(dev);
    BoundSeries mlmc_series{"||Qhat_eps - Ef||_Psi vs c6 eps", {}, {}, true};
    mlmc_series.points.push_back({eps, norm_mlmc, 0.0, k.c6() * eps, norm_mlmc <= k.c6() * eps});

    // matched-cost standard Monte Carlo at L = 0: same grid-value budget
    const std::int64_t n0_mc =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(plan.total_cost())));
    std::vector<double> dev_mc(static_cast<size_t>(replications));
    parallel_fill(replications, workers, [&](std::int64_t rix) {
        const std::uint64_t s =
            derive_seed(seed, rng_domain::kReplication, (std::uint64_t(1) << 32) | std::uint64_t(rix));
        double acc = 0.0;
        for (std::int64_t p = 0; p < n0_mc; ++p) {
            RngStream rng(s, rng_domain::kLevelBase, std::uint64_t(p));
            acc += payoff(simulate_terminal(problem, 1, rng));
        }
        dev_mc[static_cast<size_t>(rix)] = acc / static_cast<double>(n0_mc) - *oracle;
    });
    const double norm_mc = orlicz_norm(dev_mc);
    const double bias_true = std::fabs(*oracle_mean_euler(problem, payoff, 1) - *oracle);
    const double base = bias_true * bias_true + 2.0 * k.C22(0) / static_cast<double>(n0_mc);
    const double env_lo = std::sqrt(base / 2.0);
    const double env_hi = std::sqrt((3.0 + std::sqrt(3.0)) / 4.0 * base);
    BoundSeries mc_upper{"standard-MC ||Qbar - Ef||_Psi <= envelope upper", {}, {}, true};
    mc_upper.points.push_back({eps, norm_mc, 0.0, env_hi, norm_mc <= env_hi});
    BoundSeries mc_lower{"standard-MC ||Qbar - Ef||_Psi >= envelope lower (around true bias)", {}, {},
                         true};
    mc_lower.points.push_back({eps, norm_mc, 0.0, env_lo, norm_mc >= env_lo});
    {
        std::ostringstream os;
        os << "matched-cost standard MC: N0 = " << n0_mc << ", true bias = " << bias_true;
        rep.notes.push_back(os.str());
    }

    rep.series = {std::move(mlmc_series), std::move(mc_upper), std::move(mc_lower)};
    rep.finalize();
    return rep;
}

BoundCheckReport check_sup_integral_mgf(const std::vector<double>& mu_fractions, double T,
                                        std::int64_t paths, std::int64_t grid_steps,
                                        std::uint64_t seed, int workers) {
    if (!(T > 0.0)) throw std::invalid_argument("check_sup_integral_mgf: T > 0 required");
    if (grid_steps < 1) throw std::invalid_argument("check_sup_integral_mgf: grid_steps >= 1");
    for (double f : mu_fractions)
        if (f < 0.0 || f > 1.0)
            throw std::invalid_argument("check_sup_integral_mgf: fractions must lie in [0, 1]");

    std::vector<double> sup_sq(static_cast<size_t>(paths));
    const double h = T / static_cast<double>(grid_steps);
    const double sh = std::sqrt(h);
    parallel_fill(paths, workers, [&](std::int64_t p) {
        RngStream rng(seed, rng_domain::kValidation, std::uint64_t(p));
        thread_local std::vector<double> z;
        z.resize(static_cast<size_t>(grid_steps));
        rng.fill_normals(z.data(), z.size());
        double wpath = 0.0, m = 0.0;
        for (std::int64_t kk = 0; kk < grid_steps; ++kk) {
            wpath += sh * z[static_cast<size_t>(kk)];
            m = std::max(m, std::fabs(wpath));
        }
        sup_sq[static_cast<size_t>(p)] = m * m;
    });

    BoundCheckReport rep;
    rep.bound_name = "sup_integral_mgf";
    rep.replications = paths;
    rep.seed = seed;
    BoundSeries exact{"E exp(mu sup|W|^2) <= exact-form bound", {}, {}, true};
    BoundSeries simplified{"E exp(mu sup|W|^2) <= simplified bound", {}, {}, true};
    BoundSeries lower{"E exp(mu sup|W|^2) >= Gaussian sanity lower", {}, {}, true};
    std::vector<double> vals(sup_sq.size());
    for (double frac : mu_fractions) {
        const double mu = frac / (8.0 * T);
        for (size_t i = 0; i < sup_sq.size(); ++i) vals[i] = std::exp(mu * sup_sq[i]);
        const MeanSe ms = mean_se(vals);
        const double bound_exact = 1.0 / std::sqrt(1.0 - 4.0 * mu * T);
        const double bound_simpl = std::exp(4.0 * mu * T * std::numbers::ln2);
        const double lower_gauss = 1.0 / std::sqrt(1.0 - 2.0 * mu * T);
        exact.points.push_back({frac, ms.mean, ms.se, bound_exact, one_sided_ok(ms, bound_exact)});
        simplified.points.push_back(
            {frac, ms.mean, ms.se, bound_simpl, one_sided_ok(ms, bound_simpl)});
        lower.points.push_back(
            {frac, ms.mean, ms.se, lower_gauss, ms.mean + 3.0 * ms.se >= lower_gauss});
    }
    rep.series = {std::move(exact), std::move(simplified), std::move(lower)};
    rep.finalize();
    return rep;
}

std::optional<double> oracle_mean(const ProblemSpec& problem, const Payoff& payoff) {
    if (payoff.kind() != Payoff::Kind::Linear) return std::nullopt;
    const auto kind = problem.drift.kind();
    if (kind == DriftModel::Kind::Constant) {
        Vec mean = problem.x0;
        const Vec& c = problem.drift.offset();
        for (int i = 0; i < problem.d; ++i) mean[i] += problem.T * c[i];
        return dot(payoff.linear_coeff(), mean) + payoff.linear_offset();
    }
    if (kind == DriftModel::Kind::Affine) {
        const auto [M1, M2] = expm_with_integral(problem.drift.affine_matrix(), problem.T);
        const Vec mean = matvec(M1, problem.x0) + matvec(M2, problem.drift.offset());
        return dot(payoff.linear_coeff(), mean) + payoff.linear_offset();
    }
    return std::nullopt;
}

std::optional<double> oracle_mean_euler(const ProblemSpec& problem, const Payoff& payoff,
                                        std::int64_t n) {
    if (payoff.kind() != Payoff::Kind::Linear) return std::nullopt;
    const auto kind = problem.drift.kind();
    if (kind != DriftModel::Kind::Constant && kind != DriftModel::Kind::Affine) return std::nullopt;
    const int d = problem.d;
    const double h = problem.T / static_cast<double>(n);
    const Mat A = (kind == DriftModel::Kind::Constant) ? Mat(d, d, 0.0)
                                                       : problem.drift.affine_matrix();
    Mat M = Mat::identity(d);
    for (size_t i = 0; i < M.a.size(); ++i) M.a[i] += h * A.a[i];
    const auto [Mn, S] = matrix_power_with_geom_sum(M, static_cast<std::uint64_t>(n));
    const Vec mean = matvec(Mn, problem.x0) + (h * 1.0) * matvec(S, problem.drift.offset());
    return dot(payoff.linear_coeff(), mean) + payoff.linear_offset();
}

}  // namespace mlmc
