#include "cocod/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "cocod/rng.hpp"
#include "cocod/theory.hpp"

namespace cocod {

namespace {

struct Event {
  double time = 0.0;
  long long seq = 0;       // FIFO tie-break
  int worker = 0;
  int local_index = 0;     // which local step of the current period completed
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

void maybe_inject(const SimulateOptions& opts, long long step, WorkerState& state) {
  if (opts.fault && opts.fault->step == step && opts.fault->worker == state.worker_id)
    state.x[0] += opts.fault->offset;
}

}  // namespace

RunTrace simulate_run(const Objective& objective, const Partition& partition,
                      const AlgorithmVariant& variant, const CostModel& cost, const LrSchedule& lr,
                      long long total_steps, std::uint64_t sampling_seed, const ModelVector& x0,
                      const LocalUpdateOptions& update, const SimulateOptions& options) {
  const int n = partition.n_workers();
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (x0.size() != objective.dim()) throw std::invalid_argument("x0 dimension mismatch");
  if (static_cast<int>(cost.capabilities.size()) != n)
    throw std::invalid_argument("cost model capabilities mismatch");
  cost.validate();

  const std::size_t dim = objective.dim();
  const std::vector<double> batch_w = partition.batch_weights();
  const double t_comm = comm_duration(n, dim, cost.alpha, cost.beta);
  const std::uint64_t timing_seed = derive_seed(sampling_seed, kTimingSeedTag);
  const bool pipelined = variant.kind == VariantKind::kPipeSGD;
  const bool periodic =
      variant.kind == VariantKind::kLocalSGD || variant.kind == VariantKind::kCoCoD;

  std::vector<WorkerState> states = make_worker_states(n, x0);
  GradientPipeline pipeline{variant.staleness, {}};
  CommStats stats;
  std::vector<double> idle_total(n, 0.0);

  RunTrace trace;
  trace.n_workers = n;
  trace.rows.reserve(static_cast<std::size_t>(total_steps));

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  long long seq = 0;
  double clock = 0.0;
  long long step = 0;
  long long round_index = 0;

  std::vector<double> comp(n, 0.0);
  std::vector<ModelVector> grads(n);  // per-step gradients (SSGD / Pipe / logging)

  while (step < total_steps) {
    const int k_now = periodic ? variant.period.at(step) : 1;
    const int kk = static_cast<int>(std::min<long long>(k_now, total_steps - step));
    const double period_start = clock;
    const long long rounds_before = stats.rounds;

    double comp_max = 0.0;
    for (int i = 0; i < n; ++i) {
      comp[i] = compute_time(cost, i, partition.batch_sizes[i]);
      if (cost.jitter > 0.0) {
        const double u = unit_real(timing_seed, stream_id(StreamKind::kJitter, i),
                                   static_cast<std::uint64_t>(round_index), 0);
        comp[i] *= 1.0 + cost.jitter * (2.0 * u - 1.0);
      }
      comp_max = std::max(comp_max, comp[i]);
    }

    // pre-update model snapshot for every logical step of this period
    std::vector<std::vector<ModelVector>> slot(kk, std::vector<ModelVector>(n));
    for (int i = 0; i < n; ++i) {
      maybe_inject(options, step, states[i]);
      slot[0][i] = states[i].x;
    }

    if (variant.kind == VariantKind::kCoCoD) {
      for (auto& s : states) s.snapshot = s.x;  // communication operates on these
    }

    std::vector<std::vector<ModelVector>> logged_grads;
    if (options.step_log) logged_grads.assign(kk, std::vector<ModelVector>(n));

    for (int i = 0; i < n; ++i) queue.push({period_start + comp[i], seq++, i, 0});

    while (!queue.empty()) {
      const Event ev = queue.top();
      queue.pop();
      WorkerState& w = states[ev.worker];
      const long long abs_step = step + ev.local_index;
      const double gamma = lr.at(abs_step);

      if (pipelined || variant.kind == VariantKind::kSSGD) {
        // gradient only; the model moves at the barrier
        sampled_gradient(w, objective, partition, abs_step, sampling_seed, update.full_batch,
                         grads[ev.worker]);
        if (options.step_log) logged_grads[ev.local_index][ev.worker] = grads[ev.worker];
      } else {
        ModelVector g;
        sampled_gradient(w, objective, partition, abs_step, sampling_seed, update.full_batch, g);
        if (options.step_log) logged_grads[ev.local_index][ev.worker] = g;
        apply_update(w, g, gamma, update);
        if (ev.local_index + 1 < kk) {
          maybe_inject(options, abs_step + 1, w);
          slot[ev.local_index + 1][ev.worker] = w.x;
          queue.push({period_start + (ev.local_index + 2) * comp[ev.worker], seq++, ev.worker,
                      ev.local_index + 1});
        }
      }
    }

    const double barrier = period_start + kk * comp_max;

    switch (variant.kind) {
      case VariantKind::kSSGD: {
        ModelVector avg = n == 1 ? grads[0] : ring_allreduce_weighted(grads, batch_w, &stats)[0];
        const double gamma = lr.at(step);
        for (auto& s : states) apply_update(s, avg, gamma, update);
        clock = barrier + t_comm;
        break;
      }
      case VariantKind::kPipeSGD: {
        ModelVector avg = n == 1 ? grads[0] : ring_allreduce_weighted(grads, batch_w, &stats)[0];
        pipeline.pending.push_back(std::move(avg));
        if (static_cast<long long>(pipeline.pending.size()) > pipeline.staleness) {
          const ModelVector stale = std::move(pipeline.pending.front());
          pipeline.pending.pop_front();
          const double gamma = lr.at(step);
          for (auto& s : states) apply_update(s, stale, gamma, update);
        }
        clock = barrier + cost.overlap * t_comm;
        break;
      }
      case VariantKind::kLocalSGD: {
        if (n > 1) {
          std::vector<ModelVector> models(n);
          for (int i = 0; i < n; ++i) models[i] = states[i].x;
          const auto averaged = ring_allreduce_weighted(models, batch_w, &stats);
          for (int i = 0; i < n; ++i) states[i].x = averaged[i];
        }
        clock = barrier + t_comm;
        break;
      }
      case VariantKind::kCoCoD: {
        if (n > 1) {
          std::vector<ModelVector> snaps(n);
          for (int i = 0; i < n; ++i) snaps[i] = *states[i].snapshot;
          const auto averaged = ring_allreduce_weighted(snaps, batch_w, &stats);
          for (int i = 0; i < n; ++i) merge_drift(states[i], averaged[i]);
        } else {
          states[0].snapshot.reset();
        }
        // the round's cost is charged at overlap scale; workers that finish
        // computing early wait for the merge, which is part of the round, not
        // compute-phase idle
        clock = barrier + cost.overlap * t_comm;
        break;
      }
    }

    for (int j = 0; j < kk; ++j) {
      const long long abs_step = step + j;
      TraceRow row;
      row.step = abs_step;
      row.sim_time = period_start + j * comp_max;
      const ModelVector x_hat = weighted_mean_w(slot[j], batch_w);
      row.loss = objective.global_loss(x_hat);
      if (!std::isfinite(row.loss))
        throw std::runtime_error("nonfinite loss at step " + std::to_string(abs_step));
      row.grad_norm_sq = objective.global_grad_norm_sq(x_hat);
      row.comm_rounds = rounds_before;
      row.idle.resize(n);
      for (int i = 0; i < n; ++i) row.idle[i] = idle_total[i] + j * (comp_max - comp[i]);
      double div = 0.0;
      for (int i = 0; i < n; ++i) div += batch_w[i] * vec::dist_sq(x_hat, slot[j][i]);
      row.divergence = div;
      if (options.observer) options.observer->on_step(abs_step, slot[j], x_hat);
      if (options.step_log) {
        options.step_log->gamma.push_back(lr.at(abs_step));
        options.step_log->weighted.push_back(weighted_mean(logged_grads[j], partition.batch_sizes));
        if (options.step_log->per_worker) options.step_log->worker.push_back(logged_grads[j]);
      }
      trace.rows.push_back(std::move(row));
    }

    for (int i = 0; i < n; ++i) idle_total[i] += kk * (comp_max - comp[i]);
    step += kk;
    round_index += 1;
  }

  if (options.observer) options.observer->on_finish(states);

  std::vector<ModelVector> final_models(n);
  for (int i = 0; i < n; ++i) final_models[i] = states[i].x;
  const ModelVector x_hat_final = weighted_mean_w(final_models, batch_w);

  double t_comp_nominal = 0.0;
  for (int i = 0; i < n; ++i)
    t_comp_nominal = std::max(t_comp_nominal, compute_time(cost, i, partition.batch_sizes[i]));

  RunSummary& s = trace.summary;
  s.variant = variant_name(variant.kind);
  s.seed = sampling_seed;
  s.final_loss = objective.global_loss(x_hat_final);
  s.final_grad_norm_sq = objective.global_grad_norm_sq(x_hat_final);
  s.total_sim_time = clock;
  s.comm_rounds = stats.rounds;
  s.measured_ts = n * t_comp_nominal * static_cast<double>(total_steps) / clock;
  if (!periodic || variant.period.constant()) {
    const int k_const = periodic ? variant.period.at(0) : 1;
    s.predicted_ts = predicted_speedup(variant.kind, n, t_comp_nominal, t_comm, cost.overlap,
                                       k_const);
  } else {
    s.predicted_ts = std::numeric_limits<double>::quiet_NaN();
  }
  trace.idle_total = idle_total;
  return trace;
}

}  // namespace cocod
