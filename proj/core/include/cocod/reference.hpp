#pragma once

#include <cstdint>

#include "cocod/algorithms.hpp"

namespace cocod {

// Plain sequential execution of a full run: no event queue, no clock, just
// the canonical round operations in a loop. Shares the counter-based sample
// streams with the event-driven simulator, so the two trajectories must agree
// to the last bit. Observer callbacks fire at every logical step and once at
// the end.
CommStats reference_run(const Objective& objective, const Partition& partition,
                        const AlgorithmVariant& variant, const LrSchedule& lr,
                        long long total_steps, std::uint64_t sampling_seed, const ModelVector& x0,
                        const LocalUpdateOptions& update = {}, StepObserver* observer = nullptr,
                        StepLog* log = nullptr);

}  // namespace cocod
