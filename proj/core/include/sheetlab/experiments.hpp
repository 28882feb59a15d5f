#pragma once

#include <string>
#include <vector>

#include "sheetlab/config.hpp"
#include "sheetlab/report.hpp"

namespace sheetlab {

/// Known experiment names, in the order list-experiments prints them.
const std::vector<std::string>& experiment_names();

/// Validates the config, dispatches to the named experiment, aggregates the
/// replicas and writes <out_dir>/<experiment>.csv/.json (plus per-experiment
/// side files). Deterministic given (config, build).
MCReport run_experiment(const ExperimentConfig& config);

/// Resolved output directory: SHEETLAB_OUT env var overrides config out_dir.
std::string resolve_out_dir(const ExperimentConfig& config);

}  // namespace sheetlab
