#include "cocod/algorithms.hpp"

#include <stdexcept>
#include <string>

#include "cocod/rng.hpp"

namespace cocod {

const char* variant_name(VariantKind kind) {
  switch (kind) {
    case VariantKind::kSSGD: return "ssgd";
    case VariantKind::kLocalSGD: return "local";
    case VariantKind::kPipeSGD: return "pipe";
    case VariantKind::kCoCoD: return "cocod";
  }
  return "?";
}

VariantKind variant_from_name(std::string_view name) {
  if (name == "ssgd") return VariantKind::kSSGD;
  if (name == "local") return VariantKind::kLocalSGD;
  if (name == "pipe") return VariantKind::kPipeSGD;
  if (name == "cocod") return VariantKind::kCoCoD;
  throw std::invalid_argument("unknown variant: " + std::string(name));
}

ModelVector weighted_mean_w(std::span<const ModelVector> models, std::span<const double> weights) {
  if (models.empty() || weights.size() != models.size())
    throw std::invalid_argument("weights length mismatch");
  const std::size_t dim = models.front().size();
  ModelVector out(dim, 0.0);
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].size() != dim) throw std::invalid_argument("dimension mismatch");
    vec::add_scaled(out, weights[i], models[i]);
  }
  return out;
}

ModelVector weighted_mean(std::span<const ModelVector> models, std::span<const int> batch_sizes) {
  if (batch_sizes.size() != models.size()) throw std::invalid_argument("weights length mismatch");
  double total = 0.0;
  for (int m : batch_sizes) {
    if (m < 1) throw std::invalid_argument("batch sizes must be positive");
    total += static_cast<double>(m);
  }
  std::vector<double> w(batch_sizes.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(batch_sizes[i]) / total;
  return weighted_mean_w(models, w);
}

void apply_update(WorkerState& state, std::span<const double> grad, double gamma,
                  const LocalUpdateOptions& opts) {
  ModelVector g(grad.begin(), grad.end());
  if (opts.weight_decay != 0.0) vec::add_scaled(g, opts.weight_decay, state.x);
  if (opts.momentum != 0.0) {
    if (!state.momentum) state.momentum.emplace(state.x.size(), 0.0);
    for (std::size_t c = 0; c < g.size(); ++c)
      g[c] = (*state.momentum)[c] = opts.momentum * (*state.momentum)[c] + g[c];
  }
  vec::add_scaled(state.x, -gamma, g);
}

void sampled_gradient(const WorkerState& state, const Objective& objective,
                      const Partition& partition, long long step, std::uint64_t sampling_seed,
                      bool full_batch, ModelVector& g) {
  g.assign(state.x.size(), 0.0);
  const auto& shard = partition.shards[state.worker_id];
  if (full_batch) {
    const double inv = 1.0 / static_cast<double>(shard.size());
    for (std::size_t row : shard)
      objective.add_point_gradient(state.x, objective.data().point(row), inv, g);
    return;
  }
  const int batch = partition.batch_sizes[state.worker_id];
  const double inv = 1.0 / static_cast<double>(batch);
  const std::uint64_t stream = stream_id(StreamKind::kSamples, state.worker_id);
  for (int j = 0; j < batch; ++j) {
    const std::size_t pick = bounded_index(sampling_seed, stream, static_cast<std::uint64_t>(step),
                                           static_cast<std::uint64_t>(j), shard.size());
    objective.add_point_gradient(state.x, objective.data().point(shard[pick]), inv, g);
  }
}

namespace {

void log_step(StepLog* log, const Partition& partition, long long step, double gamma,
              std::span<const ModelVector> grads) {
  if (log == nullptr) return;
  (void)step;
  log->gamma.push_back(gamma);
  log->weighted.push_back(weighted_mean(grads, partition.batch_sizes));
  if (log->per_worker) log->worker.emplace_back(grads.begin(), grads.end());
}

void observe(StepObserver* observer, const Partition& partition, long long step,
             std::span<const ModelVector> models) {
  if (observer == nullptr) return;
  const ModelVector x_hat = weighted_mean(models, partition.batch_sizes);
  observer->on_step(step, models, x_hat);
}

std::vector<ModelVector> model_snapshot(const std::vector<WorkerState>& states) {
  std::vector<ModelVector> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.x);
  return out;
}

}  // namespace

void local_step(WorkerState& state, const Objective& objective, const Partition& partition,
                double gamma, long long step, std::uint64_t sampling_seed,
                const LocalUpdateOptions& opts, ModelVector* grad_out) {
  ModelVector g;
  sampled_gradient(state, objective, partition, step, sampling_seed, opts.full_batch, g);
  if (grad_out) *grad_out = g;
  apply_update(state, g, gamma, opts);
}

double divergence_metric(std::span<const WorkerState> states, const Partition& partition,
                         std::span<const double> x_hat) {
  const std::vector<double> w = partition.batch_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) s += w[i] * vec::dist_sq(x_hat, states[i].x);
  return s;
}

void merge_drift(WorkerState& state, std::span<const double> x_hat) {
  if (!state.snapshot) throw std::logic_error("merge without snapshot");
  const ModelVector& snap = *state.snapshot;
  for (std::size_t c = 0; c < state.x.size(); ++c) state.x[c] = x_hat[c] + (state.x[c] - snap[c]);
  state.snapshot.reset();
}

std::vector<WorkerState> make_worker_states(int n_workers, const ModelVector& x0) {
  std::vector<WorkerState> states(n_workers);
  for (int i = 0; i < n_workers; ++i) {
    states[i].worker_id = i;
    states[i].x = x0;
  }
  return states;
}

void ssgd_step(std::vector<WorkerState>& states, const Objective& objective,
               const Partition& partition, const LrSchedule& lr, long long step,
               std::uint64_t sampling_seed, const LocalUpdateOptions& opts, CommStats* stats,
               StepLog* log, StepObserver* observer) {
  observe(observer, partition, step, model_snapshot(states));
  const double gamma = lr.at(step);

  std::vector<ModelVector> grads(states.size());
  for (auto& s : states)
    sampled_gradient(s, objective, partition, step, sampling_seed, opts.full_batch,
                        grads[s.worker_id]);
  log_step(log, partition, step, gamma, grads);

  ModelVector avg;
  if (states.size() == 1) {
    avg = grads[0];
  } else {
    avg = ring_allreduce_weighted(grads, partition.batch_weights(), stats)[0];
  }
  for (auto& s : states) apply_update(s, avg, gamma, opts);
}

void local_sgd_round(std::vector<WorkerState>& states, const Objective& objective,
                     const Partition& partition, const LrSchedule& lr, long long start_step, int k,
                     std::uint64_t sampling_seed, const LocalUpdateOptions& opts, CommStats* stats,
                     StepLog* log, StepObserver* observer) {
  if (k < 1) throw std::invalid_argument("period must be >= 1");
  std::vector<ModelVector> grads(states.size());
  for (int j = 0; j < k; ++j) {
    const long long step = start_step + j;
    observe(observer, partition, step, model_snapshot(states));
    const double gamma = lr.at(step);
    for (auto& s : states)
      local_step(s, objective, partition, gamma, step, sampling_seed, opts,
                 log ? &grads[s.worker_id] : nullptr);
    log_step(log, partition, step, gamma, grads);
  }
  if (states.size() > 1) {
    const auto averaged =
        ring_allreduce_weighted(model_snapshot(states), partition.batch_weights(), stats);
    for (std::size_t i = 0; i < states.size(); ++i) states[i].x = averaged[i];
  }
}

SyncRoundRecord cocod_round(std::vector<WorkerState>& states, const Objective& objective,
                            const Partition& partition, const LrSchedule& lr, long long start_step,
                            int k, std::uint64_t sampling_seed, const LocalUpdateOptions& opts,
                            CommStats* stats, StepLog* log, StepObserver* observer) {
  if (k < 1) throw std::invalid_argument("period must be >= 1");

  // round starts: store the local models, communication proceeds on them
  // while the workers keep stepping
  for (auto& s : states) s.snapshot = s.x;

  std::vector<ModelVector> grads(states.size());
  for (int j = 0; j < k; ++j) {
    const long long step = start_step + j;
    observe(observer, partition, step, model_snapshot(states));
    const double gamma = lr.at(step);
    for (auto& s : states)
      local_step(s, objective, partition, gamma, step, sampling_seed, opts,
                 log ? &grads[s.worker_id] : nullptr);
    log_step(log, partition, step, gamma, grads);
  }

  SyncRoundRecord record;
  record.start_step = start_step;
  record.merge_step = start_step + k;
  if (states.size() > 1) {
    std::vector<ModelVector> snaps;
    snaps.reserve(states.size());
    for (const auto& s : states) snaps.push_back(*s.snapshot);
    CommStats local_stats;
    const auto averaged = ring_allreduce_weighted(snaps, partition.batch_weights(), &local_stats);
    record.x_hat = averaged[0];
    record.elements = local_stats.elements_sent;
    if (stats) *stats += local_stats;
    for (std::size_t i = 0; i < states.size(); ++i) merge_drift(states[i], averaged[i]);
  } else {
    record.x_hat = *states[0].snapshot;
    states[0].snapshot.reset();
  }
  return record;
}

void pipe_sgd_step(std::vector<WorkerState>& states, GradientPipeline& pipeline,
                   const Objective& objective, const Partition& partition, const LrSchedule& lr,
                   long long step, std::uint64_t sampling_seed, const LocalUpdateOptions& opts,
                   CommStats* stats, StepLog* log, StepObserver* observer) {
  if (pipeline.staleness < 1) throw std::invalid_argument("staleness must be >= 1");
  observe(observer, partition, step, model_snapshot(states));
  const double gamma = lr.at(step);

  std::vector<ModelVector> grads(states.size());
  for (auto& s : states)
    sampled_gradient(s, objective, partition, step, sampling_seed, opts.full_batch,
                        grads[s.worker_id]);
  log_step(log, partition, step, gamma, grads);

  ModelVector avg;
  if (states.size() == 1) {
    avg = grads[0];
  } else {
    avg = ring_allreduce_weighted(grads, partition.batch_weights(), stats)[0];
  }
  pipeline.pending.push_back(std::move(avg));

  // warm-fill: no update until a gradient of age `staleness` exists
  if (static_cast<long long>(pipeline.pending.size()) > pipeline.staleness) {
    const ModelVector stale = std::move(pipeline.pending.front());
    pipeline.pending.pop_front();
    for (auto& s : states) apply_update(s, stale, gamma, opts);
  }
}

}  // namespace cocod
