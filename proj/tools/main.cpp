#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "config.hpp"
#include "run.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::int64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("config", opts.config_path, "experiment config file")->required();
    sub->add_option("--seed", opts.seed, "override the master seed");
    sub->add_option("--workers", opts.workers, "override the worker count");
    sub->add_option("--out", opts.out, "override the output directory");
}

int execute(const CommonOpts& opts, const std::string& command, const std::string& bound) {
    try {
        mlmc::cli::ExperimentConfig cfg = mlmc::cli::parse_config_file(opts.config_path);
        if (opts.seed) {
            cfg.seed = static_cast<std::uint64_t>(*opts.seed);
            cfg.seed_set = true;
        }
        if (opts.workers) cfg.workers = *opts.workers;
        if (const char* env = std::getenv("MLMC_WORKERS"); env && !opts.workers)
            cfg.workers = std::max(1, std::atoi(env));
        if (opts.out) cfg.out = *opts.out;
        return mlmc::cli::run_command(cfg, command, bound, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multilevel Monte Carlo engine: constants, plan optimization, estimation and "
                 "bound validation"};
    app.require_subcommand(1);

    CommonOpts c_constants, c_optimize, c_estimate, c_validate;
    std::string bound;

    add_common(app.add_subcommand("constants", "evaluate and dump the constants bundle"),
               c_constants);
    add_common(app.add_subcommand("optimize", "derive the cost-optimal plan for eps"), c_optimize);
    add_common(app.add_subcommand("estimate", "run the multilevel estimator"), c_estimate);
    auto* val = app.add_subcommand("validate", "Monte Carlo check of one bound family");
    val->add_option("bound", bound,
                    "strong | mse | mgf-u | mgf-malliavin | mgf-estimator | tail | orlicz | appendix")
        ->required();
    add_common(val, c_validate);

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("constants")) return execute(c_constants, "constants", "");
    if (app.got_subcommand("optimize")) return execute(c_optimize, "optimize", "");
    if (app.got_subcommand("estimate")) return execute(c_estimate, "estimate", "");
    return execute(c_validate, "validate", bound);
}
