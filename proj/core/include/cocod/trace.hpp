#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cocod {

// One row per logical step t, holding the state available at the *start* of
// that step: statistics of the weighted-average model x_hat_t, and counters
// accumulated over steps before t.
struct TraceRow {
  long long step = 0;
  double sim_time = 0.0;  // seconds at which x_hat_t became available
  double loss = 0.0;
  double grad_norm_sq = 0.0;
  long long comm_rounds = 0;
  std::vector<double> idle;  // cumulative compute-phase idle per worker
  double divergence = 0.0;   // batch-weighted model spread (not serialized)
};

struct RunSummary {
  std::string variant;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  double final_grad_norm_sq = 0.0;
  double total_sim_time = 0.0;
  long long comm_rounds = 0;
  double measured_ts = 0.0;   // N * t_comp / measured mean iteration time
  double predicted_ts = 0.0;  // closed-form speedup for the same parameters
};

struct RunTrace {
  int n_workers = 0;
  std::vector<TraceRow> rows;
  RunSummary summary;
  std::vector<double> idle_total;  // full-run idle per worker
};

void write_trace_csv(const RunTrace& trace, const std::string& path);
RunTrace parse_trace_csv(const std::string& path);  // rows only; summary left default

void write_summary_csv(const RunSummary& summary, const std::string& path);
RunSummary parse_summary_csv(const std::string& path);

std::string format_real(double v);  // shortest round-trip representation
double parse_real(const std::string& text);

// Generic reader for any CSV this project emits (sweep, compare, predict).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};
CsvTable parse_csv_table(const std::string& path);

struct Target {
  enum class Metric { kLoss, kGradNormSq };
  Metric metric = Metric::kGradNormSq;
  double value = 0.0;
};

// First row at or below the target; throws "target unreached" if none.
long long steps_to_target(const RunTrace& trace, const Target& target);
double time_to_target(const RunTrace& trace, const Target& target);

// TS = T_1 / T_N and IS = T_1 / T_N at the first threshold crossing.
double measured_speedup(const RunTrace& baseline, const RunTrace& other, const Target& target);
double measured_iteration_speedup(const RunTrace& baseline, const RunTrace& other,
                                  const Target& target);

}  // namespace cocod
