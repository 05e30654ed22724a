#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cocod/config.hpp"

namespace cocod {

struct RunResult {
  RunTrace trace;
  std::string trace_path;
  std::string summary_path;
};

// Simulates the configured run and writes `<dir>/<prefix>_trace.csv` and
// `<dir>/<prefix>_summary.csv`.
RunResult run_experiment(const ExperimentConfig& config);

struct OracleReport {
  bool ok = true;
  double max_deviation = 0.0;
  long long first_divergent_step = -1;
  int worker = -1;
  long long steps_checked = 0;
};

// Cross-validates the event-driven simulator against the straight-line
// reference on the same sample streams; any per-coordinate deviation above
// 1e-12 fails. `fault` perturbs the simulator mid-run (negative control).
OracleReport verify_oracle(const ExperimentConfig& config,
                           const std::optional<FaultInjection>& fault = {});

// One summary row per axis value; axis in {N, k, a, t_comm, seed, base_batch}.
// Writes `<dir>/<prefix>_sweep_<axis>.csv` and returns the path.
std::string sweep(const ExperimentConfig& base, const std::string& axis,
                  std::span<const std::string> values);

// Runs several variant configs on the same data/seed/step-rule and writes
// step-aligned and time-aligned loss tables.
struct ComparePaths {
  std::string by_step;
  std::string by_time;
};
ComparePaths compare(std::span<const ExperimentConfig> configs,
                     std::span<const std::string> labels);

// Closed-form speedup table over the cross product of the parameter lists.
std::string predict_table(std::span<const int> n_values, std::span<const double> t_comp_values,
                          std::span<const double> t_comm_values, std::span<const double> a_values,
                          std::span<const int> k_values);

}  // namespace cocod
