#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cocod/allreduce.hpp"
#include "cocod/objective.hpp"
#include "cocod/schedule.hpp"
#include "cocod/vec.hpp"

namespace cocod {

struct AlgorithmVariant {
  VariantKind kind = VariantKind::kSSGD;
  PeriodSchedule period = PeriodSchedule::constant_k(1);  // LocalSGD / CoCoD
  int staleness = 1;                                      // PipeSGD
};

const char* variant_name(VariantKind kind);
VariantKind variant_from_name(std::string_view name);

struct LocalUpdateOptions {
  double momentum = 0.0;
  double weight_decay = 0.0;
  bool full_batch = false;  // deterministic shard-mean gradient, no sampling
};

struct WorkerState {
  int worker_id = 0;
  ModelVector x;
  std::optional<ModelVector> snapshot;  // set while a decoupled round is in flight
  std::optional<ModelVector> momentum;  // allocated on first momentum use
};

struct SyncRoundRecord {
  long long round_index = 0;
  long long start_step = 0;
  long long merge_step = 0;
  ModelVector x_hat;        // communicated weighted mean of the snapshots
  long long elements = 0;   // vector elements on the wire for this round
};

// Optional per-step gradient capture, for trajectory-identity diagnostics.
struct StepLog {
  bool per_worker = false;
  std::vector<double> gamma;                     // learning rate used at each step
  std::vector<ModelVector> weighted;             // sum_i (M_i / sum M) G_t^i
  std::vector<std::vector<ModelVector>> worker;  // [step][worker] G_t^i, iff per_worker
};

// Called at each logical step boundary with the pre-update worker models and
// their weighted mean; also after the final step with the end states.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_step(long long step, std::span<const ModelVector> models,
                       std::span<const double> x_hat) = 0;
  virtual void on_finish(std::span<const WorkerState> /*states*/) {}
};

// sum_i (M_i / sum_j M_j) x_i, left fold in ascending worker order
ModelVector weighted_mean(std::span<const ModelVector> models, std::span<const int> batch_sizes);
ModelVector weighted_mean_w(std::span<const ModelVector> models, std::span<const double> weights);

// Mini-batch gradient of one worker at absolute step index `step`, drawn with
// replacement from its shard via counter-based streams (or the exact shard
// mean in full-batch mode). Pure function of (state.x, step, seed).
void sampled_gradient(const WorkerState& state, const Objective& objective,
                      const Partition& partition, long long step, std::uint64_t sampling_seed,
                      bool full_batch, ModelVector& out);

// Descent-direction application shared by every variant: weight decay, then
// momentum, then x -= gamma * g.
void apply_update(WorkerState& state, std::span<const double> grad, double gamma,
                  const LocalUpdateOptions& opts);

// One local mini-batch SGD step of a single worker at absolute step index
// `step`; counter-based draws make it independent of execution order. When
// grad_out is set it receives the raw mini-batch gradient.
void local_step(WorkerState& state, const Objective& objective, const Partition& partition,
                double gamma, long long step, std::uint64_t sampling_seed,
                const LocalUpdateOptions& opts = {}, ModelVector* grad_out = nullptr);

// Batch-weighted mean squared distance of the local models from x_hat.
double divergence_metric(std::span<const WorkerState> states, const Partition& partition,
                         std::span<const double> x_hat);

// The decoupled merge: x <- x_hat + (x - snapshot); clears the snapshot.
void merge_drift(WorkerState& state, std::span<const double> x_hat);

std::vector<WorkerState> make_worker_states(int n_workers, const ModelVector& x0);

// --- canonical straight-line rounds ---------------------------------------
// These are the reference semantics of each variant, written as plain loops.
// The event-driven simulator realizes the same math independently; the two
// must agree to the last bit.

void ssgd_step(std::vector<WorkerState>& states, const Objective& objective,
               const Partition& partition, const LrSchedule& lr, long long step,
               std::uint64_t sampling_seed, const LocalUpdateOptions& opts = {},
               CommStats* stats = nullptr, StepLog* log = nullptr,
               StepObserver* observer = nullptr);

void local_sgd_round(std::vector<WorkerState>& states, const Objective& objective,
                     const Partition& partition, const LrSchedule& lr, long long start_step, int k,
                     std::uint64_t sampling_seed, const LocalUpdateOptions& opts = {},
                     CommStats* stats = nullptr, StepLog* log = nullptr,
                     StepObserver* observer = nullptr);

SyncRoundRecord cocod_round(std::vector<WorkerState>& states, const Objective& objective,
                            const Partition& partition, const LrSchedule& lr, long long start_step,
                            int k, std::uint64_t sampling_seed, const LocalUpdateOptions& opts = {},
                            CommStats* stats = nullptr, StepLog* log = nullptr,
                            StepObserver* observer = nullptr);

struct GradientPipeline {
  int staleness = 1;
  std::deque<ModelVector> pending;  // averaged gradients awaiting application
};

void pipe_sgd_step(std::vector<WorkerState>& states, GradientPipeline& pipeline,
                   const Objective& objective, const Partition& partition, const LrSchedule& lr,
                   long long step, std::uint64_t sampling_seed, const LocalUpdateOptions& opts = {},
                   CommStats* stats = nullptr, StepLog* log = nullptr,
                   StepObserver* observer = nullptr);

}  // namespace cocod
