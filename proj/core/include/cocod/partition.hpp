#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cocod/dataset.hpp"

namespace cocod {

// Per-worker shards of a dataset plus the sampling configuration derived from
// worker capabilities.
struct Partition {
  std::vector<std::vector<std::size_t>> shards;  // row indices, disjoint and exhaustive
  std::vector<double> capabilities;              // C_i > 0
  std::vector<double> weights;                   // p_i = |D_i| / |D|
  std::vector<int> batch_sizes;                  // M_i >= 1

  int n_workers() const { return static_cast<int>(shards.size()); }

  long long sum_batch() const {
    long long s = 0;
    for (int m : batch_sizes) s += m;
    return s;
  }

  // M_i / sum_j M_j, the averaging weights used by every collective
  std::vector<double> batch_weights() const {
    std::vector<double> w(batch_sizes.size());
    const double total = static_cast<double>(sum_batch());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(batch_sizes[i]) / total;
    return w;
  }
};

// Largest-remainder split of `total` across `n` workers, proportional to
// capabilities (equal split when capabilities is empty). Starved workers are
// topped up from the largest shard so every size is >= 1.
std::vector<std::size_t> proportional_shard_sizes(std::size_t total,
                                                  std::span<const double> capabilities,
                                                  std::size_t n);

// Shard sizes proportional to capabilities with largest-remainder rounding;
// shards are contiguous index runs in worker order. Throws "insufficient
// data" when there are fewer points than workers.
Partition partition_proportional(const Dataset& data, std::span<const double> capabilities);

// M_i = round(base_batch * C_i / min_j C_j), half away from zero, minimum 1.
std::vector<int> batch_sizes_proportional(int base_batch, std::span<const double> capabilities);

// Fills partition.batch_sizes: proportional per the rule above, or uniform
// base_batch for every worker.
void assign_batch_sizes(Partition& partition, int base_batch, bool proportional);

}  // namespace cocod
