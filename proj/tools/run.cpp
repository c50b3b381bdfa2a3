#include "run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>

#include "artifacts.hpp"

namespace mlmc::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

// constant family each bound check exercises, used in violation messages
std::string bound_label(const std::string& bound) {
    if (bound == "strong") return "K_1m / K_2m";
    if (bound == "mse") return "K_1m / K_1inf (MSE bound)";
    if (bound == "mgf-u") return "rho_17 / C_18";
    if (bound == "mgf-malliavin") return "rho_hat / Phi";
    if (bound == "mgf-estimator") return "script_C / C_50";
    if (bound == "tail") return "c2 / c3 / c4 (and C_50 full-plan bound)";
    if (bound == "orlicz") return "c6 / C_22";
    if (bound == "appendix") return "sup-integral MGF bound";
    return bound;
}

LevelPlan resolve_plan(const ExperimentConfig& cfg, const ConstantsBundle& k, const Payoff& payoff) {
    if (cfg.plan_L) {
        LevelPlan plan{cfg.m, *cfg.plan_L, cfg.plan_N};
        plan.validate();
        return plan;
    }
    if (!cfg.eps) throw std::runtime_error("config: eps or an explicit plan required");
    const OptimalPlan opt = optimal_plan(k, payoff, *cfg.eps);
    if (cfg.beta) return boosted_plan(opt, *cfg.beta).plan;
    return opt.plan();
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const std::string& bound, double wall_seconds) {
    json m;
    m["command"] = command;
    if (!bound.empty()) m["bound"] = bound;
    m["version"] = kVersion;
    m["seed"] = cfg.seed;
    m["workers"] = cfg.workers;
    m["config_hash"] = config_hash(cfg.raw_text);
    m["config_echo"] = cfg.raw_text;
    m["wall_time_seconds"] = wall_seconds;
    write_text_file(cfg.out + "/manifest.json", m.dump(2) + "\n");
}

int emit_report(const BoundCheckReport& rep, const ExperimentConfig& cfg, const std::string& bound,
                std::ostream& log, const std::string& stem = "") {
    const std::string name = stem.empty() ? bound : stem;
    write_text_file(cfg.out + "/report_" + name + ".json", report_to_json(rep).dump(2) + "\n");
    write_report_csv(rep, cfg.out);
    for (const auto& s : rep.series) {
        for (const auto& p : s.points) {
            log << (p.satisfied ? "  ok   " : "  FAIL ") << rep.bound_name << " [" << s.quantity
                << "] grid=" << p.grid_value << " empirical=" << p.empirical << " (se "
                << p.std_error << ") bound=" << p.bound << "\n";
        }
    }
    if (!rep.passed) {
        log << "BOUND VIOLATED: " << rep.bound_name << " (" << bound_label(bound) << ")\n";
        return 1;
    }
    return 0;
}

int run_validate(const ExperimentConfig& cfg, const std::string& bound, std::ostream& log) {
    const ProblemSpec problem = cfg.build_problem();
    const LevelFactor m = cfg.level_factor();

    if (bound == "appendix") {
        const BoundCheckReport rep =
            check_sup_integral_mgf(cfg.appendix_fractions, cfg.appendix_T, cfg.appendix_paths,
                                   cfg.appendix_grid, cfg.seed, cfg.workers);
        return emit_report(rep, cfg, bound, log);
    }
    if (bound == "strong") {
        ConstantsBundle k(problem, m, cfg.rho42_cap);
        const BoundCheckReport rep =
            check_strong_error(k, cfg.strong_n_list, cfg.strong_paths, cfg.seed, cfg.workers);
        return emit_report(rep, cfg, bound, log);
    }
    if (bound == "mgf-u") {
        ConstantsBundle k(problem, m, cfg.rho42_cap);
        const BoundCheckReport rep = check_mgf_u(k, cfg.mgfu_n, cfg.mgfu_fractions, cfg.mgfu_x,
                                                 cfg.mgfu_paths, cfg.seed, cfg.workers);
        return emit_report(rep, cfg, bound, log);
    }
    if (bound == "mgf-malliavin") {
        ConstantsBundle k(problem, m, cfg.rho42_cap);
        int rc = 0;
        for (size_t ri = 0; ri < cfg.mal_r.size(); ++ri) {
            BoundCheckReport rep = check_mgf_malliavin(k, cfg.mal_n, cfg.mal_r[ri], cfg.mal_j - 1,
                                                       cfg.mal_fractions, cfg.mal_paths,
                                                       cfg.seed, cfg.workers);
            rep.bound_name += "_r" + std::to_string(cfg.mal_r[ri]).substr(0, 5);
            rc = std::max(rc, emit_report(rep, cfg, bound, log,
                                          bound + "_r" + std::to_string(ri)));
        }
        return rc;
    }

    // payoff-dependent checks
    const Payoff payoff = cfg.build_payoff();
    ConstantsBundle k(problem, payoff, m, cfg.rho42_cap);
    if (bound == "mse") {
        const LevelPlan plan = resolve_plan(cfg, k, payoff);
        const BoundCheckReport rep =
            check_mse(k, plan, cfg.eps, cfg.mse_replications, cfg.seed, cfg.workers);
        return emit_report(rep, cfg, bound, log);
    }
    if (bound == "mgf-estimator") {
        const LevelPlan plan = resolve_plan(cfg, k, payoff);
        const BoundCheckReport rep = check_estimator_mgf(k, plan, cfg.est_fractions,
                                                         cfg.est_replications, cfg.seed, cfg.workers);
        return emit_report(rep, cfg, bound, log);
    }
    if (bound == "tail") {
        if (!cfg.eps) throw std::runtime_error("config: eps required for the tail check");
        const BoundCheckReport rep =
            check_concentration(k, *cfg.eps, cfg.tail_alpha_grid, cfg.tail_replications, cfg.seed,
                                cfg.beta, cfg.workers, cfg.tail_alpha_points);
        return emit_report(rep, cfg, bound, log);
    }
    if (bound == "orlicz") {
        if (!cfg.eps) throw std::runtime_error("config: eps required for the orlicz check");
        const BoundCheckReport rep =
            check_orlicz_bounds(k, *cfg.eps, cfg.orlicz_replications, cfg.seed, cfg.workers);
        return emit_report(rep, cfg, bound, log);
    }
    throw std::runtime_error(
        "unknown bound '" + bound +
        "' (expected strong | mse | mgf-u | mgf-malliavin | mgf-estimator | tail | orlicz | appendix)");
}

}  // namespace

int run_command(const ExperimentConfig& cfg, const std::string& command, const std::string& bound,
                std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.out);
    int rc = 0;

    if (command == "constants") {
        const ProblemSpec problem = cfg.build_problem();
        if (cfg.has_payoff()) {
            ConstantsBundle k(problem, cfg.build_payoff(), cfg.level_factor(), cfg.rho42_cap);
            write_text_file(cfg.out + "/constants.json", constants_to_json(k, cfg).dump(2) + "\n");
        } else {
            ConstantsBundle k(problem, cfg.level_factor(), cfg.rho42_cap);
            write_text_file(cfg.out + "/constants.json", constants_to_json(k, cfg).dump(2) + "\n");
        }
        log << "constants written to " << cfg.out << "/constants.json\n";
    } else if (command == "optimize") {
        if (!cfg.eps) throw std::runtime_error("config: eps required for optimize");
        if (cfg.m_infinite)
            throw std::runtime_error("config: optimize requires a finite refinement factor m");
        const ProblemSpec problem = cfg.build_problem();
        const Payoff payoff = cfg.build_payoff();
        ConstantsBundle k(problem, payoff, cfg.level_factor(), cfg.rho42_cap);
        const OptimalPlan opt = optimal_plan(k, payoff, *cfg.eps);
        json j = plan_to_json(opt);
        j["bias_bound"] = bias_bound(k, payoff, opt.L);
        j["mse_bound"] = mse_bound(k, payoff, opt.plan());
        if (cfg.beta) {
            const BoostedPlan bp = boosted_plan(opt, *cfg.beta);
            j["boosted"] = {{"beta", *cfg.beta}, {"N", bp.plan.N}, {"cost_ratio", bp.cost_ratio}};
        }
        write_text_file(cfg.out + "/optimize.json", j.dump(2) + "\n");
        {
            std::ostringstream csv;
            csv << "level,N,level_cost\n";
            const LevelPlan plan = opt.plan();
            for (int l = 0; l <= plan.L; ++l) {
                const double lc = (l == 0) ? static_cast<double>(plan.N[0])
                                           : static_cast<double>(plan.N[l]) * (plan.m + 1.0) *
                                                 std::pow(double(plan.m), l - 1);
                csv << l << ',' << plan.N[l] << ',' << std::setprecision(17) << lc << '\n';
            }
            write_text_file(cfg.out + "/optimize_levels.csv", csv.str());
        }
        log << "eps=" << *cfg.eps << "  L=" << opt.L << "  N_total(real)=" << opt.N_real
            << "  predicted_cost=" << opt.predicted_cost << (opt.l0_branch ? "  [L0 branch]" : "")
            << "\n";
        log << "level   N         level_cost\n";
        for (int l = 0; l <= opt.L; ++l) {
            const double lc = (l == 0) ? static_cast<double>(opt.N[0])
                                       : static_cast<double>(opt.N[l]) * (opt.m + 1.0) *
                                             std::pow(double(opt.m), l - 1);
            log << std::setw(5) << l << "   " << std::setw(9) << opt.N[l] << "  " << lc << "\n";
        }
    } else if (command == "estimate") {
        const ProblemSpec problem = cfg.build_problem();
        const Payoff payoff = cfg.build_payoff();
        ConstantsBundle k(problem, payoff, cfg.level_factor(), cfg.rho42_cap);
        const LevelPlan plan = resolve_plan(cfg, k, payoff);
        const EstimatorOutput out = mlmc_estimate(problem, payoff, plan, cfg.seed, cfg.workers);
        write_text_file(cfg.out + "/estimate.json", estimator_output_to_json(out).dump(2) + "\n");
        {
            std::ostringstream csv;
            csv << "level,mean,variance,count\n";
            for (size_t l = 0; l < out.levels.size(); ++l)
                csv << l << ',' << std::setprecision(17) << out.levels[l].mean << ','
                    << out.levels[l].variance << ',' << out.levels[l].count << '\n';
            write_text_file(cfg.out + "/estimate_levels.csv", csv.str());
        }
        log << "q_hat = " << std::setprecision(12) << out.q_hat << "  (cost " << out.total_cost
            << ", seed " << out.seed << ")\n";
    } else if (command == "validate") {
        rc = run_validate(cfg, bound, log);
    } else {
        throw std::runtime_error("unknown command '" + command + "'");
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, command, bound, wall);
    return rc;
}

}  // namespace mlmc::cli
