#include "artifacts.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mlmc::cli {

namespace {

std::string slug(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (!out.empty() && out.back() != '_')
            out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

std::string csv_num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

json report_to_json(const BoundCheckReport& rep) {
    json j;
    j["bound_name"] = rep.bound_name;
    j["replications"] = rep.replications;
    j["seed"] = rep.seed;
    j["passed"] = rep.passed;
    j["notes"] = rep.notes;
    j["series"] = json::array();
    for (const auto& s : rep.series) {
        json js;
        js["quantity"] = s.quantity;
        js["passed"] = s.passed;
        if (s.slope) js["slope"] = *s.slope;
        js["points"] = json::array();
        for (const auto& p : s.points) {
            js["points"].push_back({{"grid_value", p.grid_value},
                                    {"empirical", p.empirical},
                                    {"std_error", p.std_error},
                                    {"bound", p.bound},
                                    {"verdict", p.satisfied ? "satisfied" : "violated-beyond-3SE"}});
        }
        j["series"].push_back(std::move(js));
    }
    return j;
}

json plan_to_json(const OptimalPlan& plan) {
    json j;
    j["eps"] = plan.eps;
    j["m"] = plan.m;
    j["L"] = plan.L;
    j["N_real"] = plan.N_real;
    j["N"] = plan.N;
    j["alpha"] = plan.alpha;
    j["beta_eps"] = plan.beta_eps;
    j["x_star"] = plan.x_star;
    j["predicted_cost"] = plan.predicted_cost;
    j["l0_branch"] = plan.l0_branch;
    j["slack13"] = plan.slack13;
    j["total_cost"] = plan.plan().total_cost();
    return j;
}

json estimator_output_to_json(const EstimatorOutput& out) {
    json j;
    j["q_hat"] = out.q_hat;
    j["total_cost"] = out.total_cost;
    j["seed"] = out.seed;
    j["levels"] = json::array();
    for (size_t l = 0; l < out.levels.size(); ++l) {
        j["levels"].push_back({{"level", l},
                               {"mean", out.levels[l].mean},
                               {"variance", out.levels[l].variance},
                               {"count", out.levels[l].count}});
    }
    return j;
}

json config_echo(const ExperimentConfig& cfg) {
    json j;
    j["d"] = cfg.d;
    j["T"] = cfg.T;
    j["x0"] = cfg.x0;
    j["drift_kind"] = cfg.drift_kind;
    if (cfg.drift_kind == "affine") j["A"] = cfg.A.a;
    if (cfg.drift_kind != "smooth-sine")
        j["c"] = cfg.c;
    else
        j["amplitude"] = cfg.amplitude;
    if (cfg.has_payoff()) {
        j["payoff_u"] = cfg.u;
        j["payoff_offset"] = cfg.payoff_offset;
    }
    j["m"] = cfg.m_infinite ? json("inf") : json(cfg.m);
    if (cfg.eps) j["eps"] = *cfg.eps;
    if (cfg.beta) j["beta"] = *cfg.beta;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    return j;
}

json constants_to_json(const ConstantsBundle& k, const ExperimentConfig& cfg) {
    const ProblemSpec& p = k.problem();
    json j;
    j["inputs"] = config_echo(cfg);
    json c;
    c["C_9"] = k.C9();
    c["K_1m"] = k.K1m();
    c["K_2m"] = k.K2m();
    c["K_1inf"] = k.K1_inf();
    c["K_2inf"] = k.K2_inf();
    c["C_31"] = k.C31();
    c["rho_17"] = k.rho17();
    c["C_18_at_0"] = k.C18(0.0);
    c["C_39"] = k.C39();
    c["rho_41"] = k.rho41();
    c["rho_42"] = k.rho42();
    c["C_42"] = k.C42();
    c["lip_grad"] = p.drift.lip_grad();
    c["lap_growth"] = p.drift.lap_growth();
    c["hess_bound"] = p.drift.hess_bound();
    c["grad_lap_growth"] = p.drift.grad_lap_growth();
    c["b_at_x0"] = p.b_norm_at_x0();
    if (!k.m().is_infinite()) {
        c["C_13"] = k.C13();
    }
    if (cfg.has_payoff()) {
        c["C_50"] = k.C50();
        if (!k.m().is_infinite()) {
            c["script_C"] = k.script_C();
            c["c1"] = k.c1();
            c["c2"] = k.c2();
            c["c3"] = k.c3();
            c["c4"] = k.c4();
            c["c6"] = k.c6();
            c["c6_prime"] = k.c6_prime();
            c["c7"] = k.c7();
            c["C_22_at_L0"] = k.C22(0);
            if (cfg.eps && cfg.beta) c["c5"] = k.c5(*cfg.eps, *cfg.beta);
        }
    }
    j["constants"] = std::move(c);
    return j;
}

void write_report_csv(const BoundCheckReport& rep, const std::string& out_dir) {
    for (size_t idx = 0; idx < rep.series.size(); ++idx) {
        const auto& s = rep.series[idx];
        const std::string path = out_dir + "/" + slug(rep.bound_name) + "__s" + std::to_string(idx) +
                                 "_" + slug(s.quantity) + ".csv";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << "grid_value,empirical,std_error,bound,verdict\n";
        for (const auto& p : s.points) {
            f << csv_num(p.grid_value) << ',' << csv_num(p.empirical) << ',' << csv_num(p.std_error)
              << ',' << csv_num(p.bound) << ','
              << (p.satisfied ? "satisfied" : "violated-beyond-3SE") << '\n';
        }
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

std::string config_hash(const std::string& raw_text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : raw_text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace mlmc::cli
