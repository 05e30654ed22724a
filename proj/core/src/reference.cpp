#include "cocod/reference.hpp"

#include <algorithm>
#include <stdexcept>

namespace cocod {

CommStats reference_run(const Objective& objective, const Partition& partition,
                        const AlgorithmVariant& variant, const LrSchedule& lr,
                        long long total_steps, std::uint64_t sampling_seed, const ModelVector& x0,
                        const LocalUpdateOptions& update, StepObserver* observer, StepLog* log) {
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (x0.size() != objective.dim()) throw std::invalid_argument("x0 dimension mismatch");

  std::vector<WorkerState> states = make_worker_states(partition.n_workers(), x0);
  GradientPipeline pipeline{variant.staleness, {}};
  CommStats stats;

  long long step = 0;
  while (step < total_steps) {
    switch (variant.kind) {
      case VariantKind::kSSGD:
        ssgd_step(states, objective, partition, lr, step, sampling_seed, update, &stats, log,
                  observer);
        step += 1;
        break;
      case VariantKind::kPipeSGD:
        pipe_sgd_step(states, pipeline, objective, partition, lr, step, sampling_seed, update,
                      &stats, log, observer);
        step += 1;
        break;
      case VariantKind::kLocalSGD: {
        const int k = static_cast<int>(
            std::min<long long>(variant.period.at(step), total_steps - step));
        local_sgd_round(states, objective, partition, lr, step, k, sampling_seed, update, &stats,
                        log, observer);
        step += k;
        break;
      }
      case VariantKind::kCoCoD: {
        const int k = static_cast<int>(
            std::min<long long>(variant.period.at(step), total_steps - step));
        cocod_round(states, objective, partition, lr, step, k, sampling_seed, update, &stats, log,
                    observer);
        step += k;
        break;
      }
    }
  }
  if (observer) observer->on_finish(states);
  return stats;
}

}  // namespace cocod
