#include "cocod/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cocod {

std::vector<std::size_t> proportional_shard_sizes(std::size_t total,
                                                  std::span<const double> capabilities,
                                                  std::size_t n) {
  std::vector<double> caps(n, 1.0);
  if (!capabilities.empty()) {
    if (capabilities.size() != n) throw std::invalid_argument("capabilities length mismatch");
    caps.assign(capabilities.begin(), capabilities.end());
  }
  double cap_sum = 0.0;
  for (double c : caps) {
    if (!(c > 0.0)) throw std::invalid_argument("capabilities must be positive");
    cap_sum += c;
  }

  std::vector<std::size_t> sizes(n);
  std::vector<double> remainder(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = static_cast<double>(total) * caps[i] / cap_sum;
    sizes[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  // distribute the leftover to the largest remainders, lowest index on ties
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t j = 0; assigned < total; ++j, ++assigned) sizes[order[j % n]] += 1;

  // extreme capability ratios can starve a worker; steal from the largest shard
  for (std::size_t i = 0; i < n; ++i) {
    while (sizes[i] == 0) {
      const std::size_t big = static_cast<std::size_t>(
          std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      if (sizes[big] <= 1) throw std::invalid_argument("insufficient data");
      sizes[big] -= 1;
      sizes[i] += 1;
    }
  }
  return sizes;
}

Partition partition_proportional(const Dataset& data, std::span<const double> capabilities) {
  const std::size_t n = capabilities.size();
  if (n == 0) throw std::invalid_argument("no workers");
  if (data.size() < n) throw std::invalid_argument("insufficient data");

  const auto sizes = proportional_shard_sizes(data.size(), capabilities, n);

  Partition part;
  part.capabilities.assign(capabilities.begin(), capabilities.end());
  part.shards.resize(n);
  part.weights.resize(n);
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    part.shards[i].resize(sizes[i]);
    std::iota(part.shards[i].begin(), part.shards[i].end(), row);
    row += sizes[i];
    part.weights[i] = static_cast<double>(sizes[i]) / static_cast<double>(data.size());
  }
  part.batch_sizes.assign(n, 1);
  return part;
}

std::vector<int> batch_sizes_proportional(int base_batch, std::span<const double> capabilities) {
  if (base_batch < 1) throw std::invalid_argument("base_batch must be >= 1");
  double min_cap = 0.0;
  for (double c : capabilities) {
    if (!(c > 0.0)) throw std::invalid_argument("capabilities must be positive");
    if (min_cap == 0.0 || c < min_cap) min_cap = c;
  }
  if (capabilities.empty()) throw std::invalid_argument("no workers");

  std::vector<int> sizes(capabilities.size());
  for (std::size_t i = 0; i < capabilities.size(); ++i) {
    // half away from zero; the slowest worker gets exactly base_batch
    const long rounded = std::lround(static_cast<double>(base_batch) * capabilities[i] / min_cap);
    sizes[i] = static_cast<int>(std::max(rounded, 1L));
  }
  return sizes;
}

void assign_batch_sizes(Partition& partition, int base_batch, bool proportional) {
  if (proportional) {
    partition.batch_sizes = batch_sizes_proportional(base_batch, partition.capabilities);
  } else {
    if (base_batch < 1) throw std::invalid_argument("base_batch must be >= 1");
    partition.batch_sizes.assign(partition.shards.size(), base_batch);
  }
}

}  // namespace cocod
