#include "cocod/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cocod/reference.hpp"
#include "cocod/theory.hpp"

namespace cocod {

namespace {

std::string output_path(const ExperimentConfig& config, const std::string& suffix) {
  std::filesystem::create_directories(config.out_dir);
  return (std::filesystem::path(config.out_dir) / (config.out_prefix + suffix)).string();
}

RunTrace simulate_from_config(const ExperimentConfig& config, const SimulateOptions& options = {}) {
  Problem p = build_problem(config);
  RunTrace trace = simulate_run(*p.objective, p.partition, p.variant, p.cost, p.lr, p.total_steps,
                                p.sampling_seed, p.x0, p.update, options);
  trace.summary.seed = config.seed;  // report the user-facing seed
  return trace;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  Problem p = build_problem(config);
  RunResult result;
  result.trace = simulate_run(*p.objective, p.partition, p.variant, p.cost, p.lr, p.total_steps,
                              p.sampling_seed, p.x0, p.update);
  result.trace.summary.seed = config.seed;
  result.trace_path = output_path(config, "_trace.csv");
  result.summary_path = output_path(config, "_summary.csv");
  write_trace_csv(result.trace, result.trace_path);
  write_summary_csv(result.trace.summary, result.summary_path);
  if (config.dump_dataset) save_dataset_csv(p.dataset, output_path(config, "_dataset.csv"));
  return result;
}

namespace {

// stores the simulator trajectory, then replays against the reference
class CaptureObserver final : public StepObserver {
 public:
  std::vector<std::vector<ModelVector>> models;  // [step][worker]
  std::vector<ModelVector> final_models;

  void on_step(long long, std::span<const ModelVector> m, std::span<const double>) override {
    models.emplace_back(m.begin(), m.end());
  }
  void on_finish(std::span<const WorkerState> states) override {
    for (const auto& s : states) final_models.push_back(s.x);
  }
};

class CompareObserver final : public StepObserver {
 public:
  const CaptureObserver* captured = nullptr;
  OracleReport report;

  void check(long long step, std::span<const ModelVector> expected,
             std::span<const ModelVector> actual) {
    for (std::size_t i = 0; i < actual.size(); ++i) {
      for (std::size_t c = 0; c < actual[i].size(); ++c) {
        const double dev = std::abs(expected[i][c] - actual[i][c]);
        report.max_deviation = std::max(report.max_deviation, dev);
        if (dev > 1e-12 && report.first_divergent_step < 0) {
          report.first_divergent_step = step;
          report.worker = static_cast<int>(i);
          report.ok = false;
        }
      }
    }
  }

  void on_step(long long step, std::span<const ModelVector> m, std::span<const double>) override {
    if (static_cast<std::size_t>(step) >= captured->models.size())
      throw std::logic_error("trajectory length mismatch");
    check(step, captured->models[static_cast<std::size_t>(step)], m);
    report.steps_checked += 1;
  }
  void on_finish(std::span<const WorkerState> states) override {
    std::vector<ModelVector> finals;
    for (const auto& s : states) finals.push_back(s.x);
    check(report.steps_checked, captured->final_models, finals);
  }
};

}  // namespace

OracleReport verify_oracle(const ExperimentConfig& config,
                           const std::optional<FaultInjection>& fault) {
  Problem p = build_problem(config);
  if (p.total_steps > 10000 || p.objective->dim() > 64)
    throw std::invalid_argument("verify-oracle is desk-scale only (steps <= 10000, dimension <= 64)");

  CaptureObserver captured;
  SimulateOptions options;
  options.observer = &captured;
  options.fault = fault;
  simulate_run(*p.objective, p.partition, p.variant, p.cost, p.lr, p.total_steps, p.sampling_seed,
               p.x0, p.update, options);

  CompareObserver compare;
  compare.captured = &captured;
  reference_run(*p.objective, p.partition, p.variant, p.lr, p.total_steps, p.sampling_seed, p.x0,
                p.update, &compare);
  return compare.report;
}

namespace {

struct SweepRow {
  std::string value;
  RunSummary summary;
  double measured_is = std::numeric_limits<double>::quiet_NaN();
};

void write_sweep_row(std::ofstream& out, const std::string& axis, const SweepRow& row) {
  const RunSummary& s = row.summary;
  out << axis << ',' << row.value << ',' << s.variant << ',' << s.seed << ','
      << format_real(s.final_loss) << ',' << format_real(s.final_grad_norm_sq) << ','
      << format_real(s.total_sim_time) << ',' << s.comm_rounds << ',' << format_real(s.measured_ts)
      << ',' << format_real(s.predicted_ts) << ',' << format_real(row.measured_is) << '\n';
}

}  // namespace

std::string sweep(const ExperimentConfig& base, const std::string& axis,
                  std::span<const std::string> values) {
  static const std::set<std::string> kAxes = {"N", "k", "a", "t_comm", "seed", "base_batch"};
  if (!kAxes.contains(axis)) throw std::invalid_argument("non-sweepable axis: " + axis);
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");

  std::optional<Target> target;
  {
    Problem p = build_problem(base);
    target = p.target;
  }

  std::vector<SweepRow> rows;
  std::optional<RunTrace> first_trace;
  for (const auto& value : values) {
    ExperimentConfig config = base;
    if (axis == "N") {
      if (config.capabilities.size() > 1)
        throw std::invalid_argument("sweep over N needs homogeneous capabilities");
      apply_override(config, "experiment.workers", value);
    } else if (axis == "k") {
      apply_override(config, "experiment.period", value);
    } else if (axis == "a") {
      apply_override(config, "cost_model.overlap", value);
    } else if (axis == "t_comm") {
      // realize the requested round duration through the latency term
      const double t = parse_real(value);
      if (config.workers < 2) throw std::invalid_argument("t_comm sweep needs workers >= 2");
      apply_override(config, "cost_model.beta", "0");
      apply_override(config, "cost_model.alpha", format_real(t / (2.0 * (config.workers - 1))));
    } else if (axis == "seed") {
      apply_override(config, "experiment.seed", value);
    } else {  // base_batch
      apply_override(config, "experiment.base_batch", value);
    }

    RunTrace trace = simulate_from_config(config);
    SweepRow row;
    row.value = value;
    row.summary = trace.summary;
    if (target) {
      if (!first_trace) first_trace = trace;
      try {
        row.measured_is = measured_iteration_speedup(*first_trace, trace, *target);
      } catch (const std::runtime_error&) {
        // target unreached in one of the traces; leave NaN
      }
    }
    rows.push_back(std::move(row));
  }

  if (axis == "seed" && rows.size() > 1) {
    SweepRow mean;
    mean.value = "mean";
    mean.summary = rows.front().summary;
    mean.summary.seed = 0;
    double loss = 0, grad = 0, time = 0, ts = 0, pts = 0, is = 0;
    long long rounds = 0;
    int is_count = 0;
    for (const auto& r : rows) {
      loss += r.summary.final_loss;
      grad += r.summary.final_grad_norm_sq;
      time += r.summary.total_sim_time;
      ts += r.summary.measured_ts;
      pts += r.summary.predicted_ts;
      rounds += r.summary.comm_rounds;
      if (std::isfinite(r.measured_is)) {
        is += r.measured_is;
        ++is_count;
      }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    mean.summary.final_loss = loss * inv;
    mean.summary.final_grad_norm_sq = grad * inv;
    mean.summary.total_sim_time = time * inv;
    mean.summary.measured_ts = ts * inv;
    mean.summary.predicted_ts = pts * inv;
    mean.summary.comm_rounds = rounds / static_cast<long long>(rows.size());
    mean.measured_is = is_count > 0 ? is / is_count : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(std::move(mean));
  }

  const std::string path = output_path(base, "_sweep_" + axis + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "axis,value,variant,seed,final_loss,final_grad_norm_sq,total_sim_time_s,comm_rounds,"
         "measured_ts,predicted_ts,measured_is\n";
  for (const auto& row : rows) write_sweep_row(out, axis, row);
  return path;
}

namespace {

void require_shared_setup(const ExperimentConfig& a, const ExperimentConfig& b) {
  const bool same = a.seed == b.seed && a.dimension == b.dimension && a.workers == b.workers &&
                    a.capabilities == b.capabilities && a.base_batch == b.base_batch &&
                    a.proportional_batches == b.proportional_batches &&
                    a.dataset.total_points == b.dataset.total_points &&
                    a.dataset.spread == b.dataset.spread &&
                    a.dataset.shard_offset == b.dataset.shard_offset &&
                    a.dataset.identical_shards == b.dataset.identical_shards &&
                    a.dataset.proportional_data == b.dataset.proportional_data &&
                    a.dataset_file == b.dataset_file && a.objective == b.objective &&
                    a.lr_rule == b.lr_rule && a.lr_base == b.lr_base && a.lr_scale == b.lr_scale &&
                    a.warmup_steps == b.warmup_steps && a.decay_points == b.decay_points &&
                    a.decay_factor == b.decay_factor;
  if (!same) throw std::invalid_argument("mismatched dataset parameters");
}

}  // namespace

ComparePaths compare(std::span<const ExperimentConfig> configs,
                     std::span<const std::string> labels) {
  if (configs.size() < 2) throw std::invalid_argument("compare needs at least two configs");
  if (labels.size() != configs.size()) throw std::invalid_argument("labels length mismatch");
  for (std::size_t i = 1; i < configs.size(); ++i) require_shared_setup(configs[0], configs[i]);

  std::vector<RunTrace> traces;
  traces.reserve(configs.size());
  for (const auto& config : configs) traces.push_back(simulate_from_config(config));

  ComparePaths paths;
  paths.by_step = output_path(configs[0], "_compare_by_step.csv");
  paths.by_time = output_path(configs[0], "_compare_by_time.csv");

  {
    std::ofstream out(paths.by_step);
    if (!out) throw std::runtime_error("cannot open for writing: " + paths.by_step);
    out << "step";
    for (const auto& label : labels) out << ",loss_" << label << ",grad_norm_sq_" << label;
    out << '\n';
    std::size_t max_rows = 0;
    for (const auto& t : traces) max_rows = std::max(max_rows, t.rows.size());
    for (std::size_t r = 0; r < max_rows; ++r) {
      out << (traces[0].rows.size() > r ? traces[0].rows[r].step : static_cast<long long>(r));
      for (const auto& t : traces) {
        if (r < t.rows.size())
          out << ',' << format_real(t.rows[r].loss) << ',' << format_real(t.rows[r].grad_norm_sq);
        else
          out << ",nan,nan";
      }
      out << '\n';
    }
  }

  {
    std::ofstream out(paths.by_time);
    if (!out) throw std::runtime_error("cannot open for writing: " + paths.by_time);
    out << "sim_time_s";
    for (const auto& label : labels) out << ",loss_" << label << ",grad_norm_sq_" << label;
    out << '\n';
    std::set<double> times;
    for (const auto& t : traces)
      for (const auto& row : t.rows) times.insert(row.sim_time);
    std::vector<std::size_t> cursor(traces.size(), 0);
    for (double time : times) {
      out << format_real(time);
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& rows = traces[i].rows;
        while (cursor[i] + 1 < rows.size() && rows[cursor[i] + 1].sim_time <= time) ++cursor[i];
        // the trace's state at `time` is the last row made available by then
        if (rows[cursor[i]].sim_time <= time)
          out << ',' << format_real(rows[cursor[i]].loss) << ','
              << format_real(rows[cursor[i]].grad_norm_sq);
        else
          out << ",nan,nan";
      }
      out << '\n';
    }
  }
  return paths;
}

std::string predict_table(std::span<const int> n_values, std::span<const double> t_comp_values,
                          std::span<const double> t_comm_values, std::span<const double> a_values,
                          std::span<const int> k_values) {
  static constexpr VariantKind kKinds[] = {VariantKind::kSSGD, VariantKind::kPipeSGD,
                                           VariantKind::kLocalSGD, VariantKind::kCoCoD};
  std::ostringstream out;
  out << "variant,n,t_comp,t_comm,a,k,predicted_ts\n";
  for (int n : n_values)
    for (double tc : t_comp_values)
      for (double tm : t_comm_values)
        for (double a : a_values)
          for (int k : k_values)
            for (VariantKind kind : kKinds)
              out << variant_name(kind) << ',' << n << ',' << format_real(tc) << ','
                  << format_real(tm) << ',' << format_real(a) << ',' << k << ','
                  << format_real(predicted_speedup(kind, n, tc, tm, a, k)) << '\n';
  return out.str();
}

}  // namespace cocod
