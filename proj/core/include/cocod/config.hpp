#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cocod/algorithms.hpp"
#include "cocod/cost_model.hpp"
#include "cocod/dataset.hpp"
#include "cocod/engine.hpp"
#include "cocod/schedule.hpp"
#include "cocod/trace.hpp"

namespace cocod {

// Flat `key = value` text with [section] headers; every key is validated and
// unknown ones are rejected by name. CLI --set section.key=value overrides go
// through the same table.
struct ExperimentConfig {
  // [experiment]
  std::uint64_t seed = 1;
  int dimension = 2;
  int workers = 1;
  std::vector<double> capabilities;  // empty -> all ones; single value replicated
  int base_batch = 32;
  bool proportional_batches = true;
  std::string variant = "cocod";
  int period = 1;
  std::string period_schedule;  // "0:1,10:5" boundaries in epochs if epochs set, else steps
  int staleness = 1;
  long long steps = 0;  // exactly one of steps / epochs
  int epochs = 0;
  std::string final_period = "merge";  // or "truncate"
  double x0 = 1.0;
  std::string objective = "quadratic";
  double momentum = 0.0;
  double weight_decay = 0.0;
  bool full_batch = false;

  // [dataset]
  GeneratorParams dataset;
  std::string dataset_file;  // load CSV instead of generating

  // [learning_rate]
  std::string lr_rule = "fixed";  // fixed | scaled | corollary
  double lr_base = 0.01;
  std::string lr_scale = "capabilities";  // workers | capabilities (rule=scaled)
  long long warmup_steps = 0;
  std::vector<double> decay_points;  // epochs if epochs set, else steps
  double decay_factor = 10.0;

  // [cost_model]
  double per_sample_time = 1e-3;
  double alpha = 0.0;
  double beta = 0.0;
  double overlap = 1.0;
  double jitter = 0.0;

  // [target]
  std::string target_metric = "none";  // none | loss | grad_norm_sq
  double target_value = 0.0;

  // [output]
  std::string out_dir = "out";
  std::string out_prefix = "run";
  bool dump_dataset = false;  // also write <prefix>_dataset.csv
};

ExperimentConfig parse_config_file(const std::string& path);
// key is "section.name"; value in the same syntax as the file
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);

// Everything needed to simulate, resolved from a config.
struct Problem {
  Dataset dataset;
  Partition partition;
  std::unique_ptr<Objective> objective;
  AlgorithmVariant variant;
  CostModel cost;
  LrSchedule lr;
  LocalUpdateOptions update;
  long long total_steps = 0;
  long long steps_per_epoch = 0;
  ModelVector x0;
  std::uint64_t sampling_seed = 0;
  std::optional<Target> target;
};

Problem build_problem(const ExperimentConfig& config);

}  // namespace cocod
