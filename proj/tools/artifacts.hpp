#pragma once

#include <string>

#include "json.hpp"
#include "mlmc/optimize.hpp"
#include "mlmc/validate.hpp"

#include "config.hpp"

namespace mlmc::cli {

using json = nlohmann::ordered_json;

json report_to_json(const BoundCheckReport& rep);
json plan_to_json(const OptimalPlan& plan);
json estimator_output_to_json(const EstimatorOutput& out);
json config_echo(const ExperimentConfig& cfg);

// constants bundle dump keyed by the library's stable labels
json constants_to_json(const ConstantsBundle& k, const ExperimentConfig& cfg);

// one CSV per series with the fixed column contract
//   grid_value,empirical,std_error,bound,verdict
void write_report_csv(const BoundCheckReport& rep, const std::string& out_dir);

void write_text_file(const std::string& path, const std::string& content);
std::string config_hash(const std::string& raw_text);  // FNV-1a, hex

}  // namespace mlmc::cli
