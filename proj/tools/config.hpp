#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlmc/constants.hpp"
#include "mlmc/model.hpp"

namespace mlmc::cli {

// Experiment description parsed from a flat `key = value` text file with
// dotted keys and comma-separated lists. Unknown keys are rejected. The seed
// is mandatory: no wall-clock seeding anywhere.
struct ExperimentConfig {
    // problem
    int d = 1;
    Vec x0;
    double T = 1.0;
    std::string drift_kind = "affine";
    Mat A;
    Vec c;
    double amplitude = 1.0;
    std::optional<double> lip_grad, lap_growth, hess_bound, grad_lap_growth;

    // payoff (config files declare linear payoffs; other kinds are library-only)
    Vec u;
    double payoff_offset = 0.0;
    std::optional<double> lip, grad_lip;

    // estimator configuration
    bool m_infinite = false;
    int m = 2;
    std::optional<double> eps;
    std::optional<double> beta;
    std::optional<int> plan_L;
    std::vector<std::int64_t> plan_N;

    double rho42_cap = 1e12;

    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 1;
    std::string out = "out";

    // validation grids
    std::vector<std::int64_t> strong_n_list{4, 8, 16, 32};
    std::int64_t strong_paths = 100000;
    std::int64_t mse_replications = 200;
    std::int64_t mgfu_n = 16;
    double mgfu_x = 0.0;
    std::vector<double> mgfu_fractions{0.25, 0.5, 1.0};
    std::int64_t mgfu_paths = 100000;
    std::int64_t mal_n = 16;
    std::vector<double> mal_r{0.1, 0.5};
    int mal_j = 1;  // 1-based coordinate
    std::vector<double> mal_fractions{0.5, 1.0};
    std::int64_t mal_paths = 100000;
    std::vector<double> est_fractions{-1.0, -0.5, 0.5, 1.0};
    std::int64_t est_replications = 10000;
    std::int64_t tail_replications = 10000;
    int tail_alpha_points = 8;
    std::vector<double> tail_alpha_grid;  // optional explicit grid
    std::int64_t orlicz_replications = 10000;
    std::vector<double> appendix_fractions{0.25, 0.5, 1.0};
    std::int64_t appendix_paths = 1000000;
    std::int64_t appendix_grid = 4096;
    double appendix_T = 1.0;

    std::string raw_text;  // verbatim file contents, echoed into the manifest

    ProblemSpec build_problem() const;
    Payoff build_payoff() const;
    LevelFactor level_factor() const;
    bool has_payoff() const { return !u.empty(); }
};

// Throws std::runtime_error with a line-numbered message on any schema or
// syntax problem.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace mlmc::cli
