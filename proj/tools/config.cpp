#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mlmc::cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(v);
    while (std::getline(is, cur, ',')) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "': cannot parse number '" + v + "'");
    }
}

std::int64_t to_int(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "': cannot parse integer '" + v + "'");
    }
}

std::vector<double> to_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_list(v)) out.push_back(to_double(tok, key));
    if (out.empty()) throw std::runtime_error("config: key '" + key + "': empty list");
    return out;
}

std::vector<std::int64_t> to_int_list(const std::string& v, const std::string& key) {
    std::vector<std::int64_t> out;
    for (const auto& tok : split_list(v)) out.push_back(to_int(tok, key));
    if (out.empty()) throw std::runtime_error("config: key '" + key + "': empty list");
    return out;
}

Vec expand_to_dim(std::vector<double> vals, int d, const std::string& key) {
    if (static_cast<int>(vals.size()) == d) return vals;
    if (vals.size() == 1) return Vec(static_cast<size_t>(d), vals[0]);
    throw std::runtime_error("config: key '" + key + "': expected 1 or " + std::to_string(d) +
                             " values, got " + std::to_string(vals.size()));
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    {
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config: line " + std::to_string(lineno) +
                                         ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error("config: line " + std::to_string(lineno) + ": empty key");
            if (kv.count(key))
                throw std::runtime_error("config: line " + std::to_string(lineno) +
                                         ": duplicate key '" + key + "'");
            if (!val.empty()) kv[key] = val;
        }
    }

    ExperimentConfig cfg;
    cfg.raw_text = text;

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("problem.d")) cfg.d = static_cast<int>(to_int(*v, "problem.d"));
    if (cfg.d < 1) throw std::runtime_error("config: problem.d >= 1 required");
    if (auto v = take("problem.T")) cfg.T = to_double(*v, "problem.T");
    if (auto v = take("problem.x0"))
        cfg.x0 = expand_to_dim(to_double_list(*v, "problem.x0"), cfg.d, "problem.x0");
    else
        cfg.x0 = Vec(static_cast<size_t>(cfg.d), 0.0);

    if (auto v = take("drift.kind")) cfg.drift_kind = *v;
    if (cfg.drift_kind != "constant" && cfg.drift_kind != "affine" && cfg.drift_kind != "smooth-sine")
        throw std::runtime_error("config: drift.kind must be constant | affine | smooth-sine");
    if (auto v = take("drift.A")) {
        const auto vals = to_double_list(*v, "drift.A");
        cfg.A = Mat(cfg.d, cfg.d, 0.0);
        if (vals.size() == 1) {
            for (int i = 0; i < cfg.d; ++i) cfg.A(i, i) = vals[0];
        } else if (static_cast<int>(vals.size()) == cfg.d * cfg.d) {
            cfg.A.a = vals;
        } else {
            throw std::runtime_error("config: drift.A needs 1 (scalar * I) or d*d values");
        }
    }
    if (auto v = take("drift.c"))
        cfg.c = expand_to_dim(to_double_list(*v, "drift.c"), cfg.d, "drift.c");
    else
        cfg.c = Vec(static_cast<size_t>(cfg.d), 0.0);
    if (auto v = take("drift.amplitude")) cfg.amplitude = to_double(*v, "drift.amplitude");
    if (auto v = take("drift.lip_grad")) cfg.lip_grad = to_double(*v, "drift.lip_grad");
    if (auto v = take("drift.lap_growth")) cfg.lap_growth = to_double(*v, "drift.lap_growth");
    if (auto v = take("drift.hess_bound")) cfg.hess_bound = to_double(*v, "drift.hess_bound");
    if (auto v = take("drift.grad_lap_growth"))
        cfg.grad_lap_growth = to_double(*v, "drift.grad_lap_growth");

    if (auto v = take("payoff.kind")) {
        if (*v != "linear") throw std::runtime_error("config: payoff.kind must be linear");
    }
    if (auto v = take("payoff.u"))
        cfg.u = expand_to_dim(to_double_list(*v, "payoff.u"), cfg.d, "payoff.u");
    if (auto v = take("payoff.offset")) cfg.payoff_offset = to_double(*v, "payoff.offset");
    if (auto v = take("payoff.lip")) cfg.lip = to_double(*v, "payoff.lip");
    if (auto v = take("payoff.grad_lip")) cfg.grad_lip = to_double(*v, "payoff.grad_lip");

    if (auto v = take("m")) {
        if (*v == "inf" || *v == "infinity") {
            cfg.m_infinite = true;
        } else {
            cfg.m = static_cast<int>(to_int(*v, "m"));
            if (cfg.m < 2) throw std::runtime_error("config: m >= 2 (or inf) required");
        }
    }
    if (auto v = take("eps")) cfg.eps = to_double(*v, "eps");
    if (auto v = take("beta")) cfg.beta = to_double(*v, "beta");
    if (auto v = take("plan.L")) cfg.plan_L = static_cast<int>(to_int(*v, "plan.L"));
    if (auto v = take("plan.N")) cfg.plan_N = to_int_list(*v, "plan.N");
    if (cfg.plan_L.has_value() != !cfg.plan_N.empty())
        throw std::runtime_error("config: plan.L and plan.N must be given together");
    if (cfg.plan_L && cfg.eps)
        throw std::runtime_error("config: give either an explicit plan or eps, not both");

    if (auto v = take("constants.rho42_cap")) {
        cfg.rho42_cap = to_double(*v, "constants.rho42_cap");
        if (!(cfg.rho42_cap > 0.0)) throw std::runtime_error("config: constants.rho42_cap > 0");
    }
    if (auto v = take("seed")) {
        cfg.seed = static_cast<std::uint64_t>(to_int(*v, "seed"));
        cfg.seed_set = true;
    }
    if (!cfg.seed_set) throw std::runtime_error("config: seed is mandatory (no wall-clock seeding)");
    if (auto v = take("workers")) cfg.workers = static_cast<int>(to_int(*v, "workers"));
    if (cfg.workers < 1) throw std::runtime_error("config: workers >= 1 required");
    if (auto v = take("out")) cfg.out = *v;

    if (auto v = take("validate.strong.n_list"))
        cfg.strong_n_list = to_int_list(*v, "validate.strong.n_list");
    if (auto v = take("validate.strong.paths"))
        cfg.strong_paths = to_int(*v, "validate.strong.paths");
    if (auto v = take("validate.mse.replications"))
        cfg.mse_replications = to_int(*v, "validate.mse.replications");
    if (auto v = take("validate.mgf_u.n")) cfg.mgfu_n = to_int(*v, "validate.mgf_u.n");
    if (auto v = take("validate.mgf_u.x")) cfg.mgfu_x = to_double(*v, "validate.mgf_u.x");
    if (auto v = take("validate.mgf_u.fractions"))
        cfg.mgfu_fractions = to_double_list(*v, "validate.mgf_u.fractions");
    if (auto v = take("validate.mgf_u.paths")) cfg.mgfu_paths = to_int(*v, "validate.mgf_u.paths");
    if (auto v = take("validate.mgf_malliavin.n"))
        cfg.mal_n = to_int(*v, "validate.mgf_malliavin.n");
    if (auto v = take("validate.mgf_malliavin.r_list"))
        cfg.mal_r = to_double_list(*v, "validate.mgf_malliavin.r_list");
    if (auto v = take("validate.mgf_malliavin.j"))
        cfg.mal_j = static_cast<int>(to_int(*v, "validate.mgf_malliavin.j"));
    if (auto v = take("validate.mgf_malliavin.fractions"))
        cfg.mal_fractions = to_double_list(*v, "validate.mgf_malliavin.fractions");
    if (auto v = take("validate.mgf_malliavin.paths"))
        cfg.mal_paths = to_int(*v, "validate.mgf_malliavin.paths");
    if (auto v = take("validate.mgf_estimator.fractions"))
        cfg.est_fractions = to_double_list(*v, "validate.mgf_estimator.fractions");
    if (auto v = take("validate.mgf_estimator.replications"))
        cfg.est_replications = to_int(*v, "validate.mgf_estimator.replications");
    if (auto v = take("validate.tail.replications"))
        cfg.tail_replications = to_int(*v, "validate.tail.replications");
    if (auto v = take("validate.tail.alpha_points"))
        cfg.tail_alpha_points = static_cast<int>(to_int(*v, "validate.tail.alpha_points"));
    if (auto v = take("validate.tail.alpha_grid"))
        cfg.tail_alpha_grid = to_double_list(*v, "validate.tail.alpha_grid");
    if (auto v = take("validate.orlicz.replications"))
        cfg.orlicz_replications = to_int(*v, "validate.orlicz.replications");
    if (auto v = take("validate.appendix.fractions"))
        cfg.appendix_fractions = to_double_list(*v, "validate.appendix.fractions");
    if (auto v = take("validate.appendix.paths"))
        cfg.appendix_paths = to_int(*v, "validate.appendix.paths");
    if (auto v = take("validate.appendix.grid_steps"))
        cfg.appendix_grid = to_int(*v, "validate.appendix.grid_steps");
    if (auto v = take("validate.appendix.T")) cfg.appendix_T = to_double(*v, "validate.appendix.T");

    if (!kv.empty()) {
        std::string unknown;
        for (const auto& [key, _] : kv) unknown += (unknown.empty() ? "" : ", ") + key;
        throw std::runtime_error("config: unknown key(s): " + unknown);
    }
    if (!(cfg.T > 0.0)) throw std::runtime_error("config: problem.T > 0 required");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ProblemSpec ExperimentConfig::build_problem() const {
    DriftModel drift = [&]() {
        if (drift_kind == "constant")
            return lip_grad ? DriftModel::constant(c, *lip_grad) : DriftModel::constant(c);
        if (drift_kind == "affine") {
            Mat Am = A;
            if (Am.rows == 0) throw std::runtime_error("config: drift.A required for affine drift");
            return hess_bound ? DriftModel::affine(Am, c, *hess_bound) : DriftModel::affine(Am, c);
        }
        return DriftModel::smooth_sine(d, amplitude);
    }();
    if (lip_grad && drift_kind != "constant") drift.set_lip_grad(*lip_grad);
    if (lap_growth) drift.set_lap_growth(*lap_growth);
    if (hess_bound && drift_kind != "affine") drift.set_hess_bound(*hess_bound);
    if (grad_lap_growth) drift.set_grad_lap_growth(*grad_lap_growth);
    return ProblemSpec(x0, T, drift);
}

Payoff ExperimentConfig::build_payoff() const {
    if (u.empty()) throw std::runtime_error("config: payoff.u required for this command");
    return Payoff::linear(u, payoff_offset, grad_lip, lip);
}

LevelFactor ExperimentConfig::level_factor() const {
    return m_infinite ? LevelFactor::infinite() : LevelFactor::finite(m);
}

}  // namespace mlmc::cli
