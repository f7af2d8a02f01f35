#pragma once

#include <string>

#include "salsa/config.hpp"

namespace salsa {

/// Full analyze pipeline: resolve inputs/centers per the config, run the
/// estimator batch, and emit smoothness.csv, summary.txt and optional raw
/// dumps into cfg.io.output. Throws salsa errors; prints a one-line result.
void run_analyze(const RunConfig& cfg);

/// Run one prebuilt rate experiment (or "all") and write rate_<name>.csv
/// and rate_<name>.txt (table + fitted-vs-predicted footer + consistency
/// line) into out_dir.
void run_rates(const std::string& experiment, const std::string& out_dir,
               double tau = 3.0, int levels = 10);

/// Materialize a built-in test function on a grid (n = points per axis) or
/// a Halton set (n = point count) and write it as a data table.
void run_synth(const std::string& function, const std::string& sampler, int n,
               const std::string& out_path);

}  // namespace salsa
