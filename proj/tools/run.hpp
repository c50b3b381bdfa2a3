#pragma once

#include <ostream>
#include <string>

#include "config.hpp"

namespace mlmc::cli {

// Executes one CLI command against a parsed config and writes all artifacts
// under cfg.out. Returns the process exit status: 0 on success, 1 when any
// requested bound check is violated (config errors are thrown and mapped to
// exit 2 by the caller).
int run_command(const ExperimentConfig& cfg, const std::string& command, const std::string& bound,
                std::ostream& log);

}  // namespace mlmc::cli
