#pragma once

#include <cstdint>
#include <optional>

#include "cocod/algorithms.hpp"
#include "cocod/cost_model.hpp"
#include "cocod/trace.hpp"

namespace cocod {

// Fault-injection hook for the oracle's negative control: adds `offset` to
// coordinate 0 of the named worker's model the moment x_step is defined.
struct FaultInjection {
  long long step = -1;
  int worker = 0;
  double offset = 1e-6;
};

struct SimulateOptions {
  StepObserver* observer = nullptr;
  StepLog* step_log = nullptr;
  std::optional<FaultInjection> fault;
};

// Event-driven wall-clock simulation of one run. Per-worker compute
// completions are scheduled on an event queue; communication is charged per
// round (full cost when it blocks, overlap-scaled when it runs concurrently
// with computation). The logical trajectory depends only on the sampling
// seed, never on the cost model.
RunTrace simulate_run(const Objective& objective, const Partition& partition,
                      const AlgorithmVariant& variant, const CostModel& cost, const LrSchedule& lr,
                      long long total_steps, std::uint64_t sampling_seed, const ModelVector& x0,
                      const LocalUpdateOptions& update = {}, const SimulateOptions& options = {});

}  // namespace cocod
