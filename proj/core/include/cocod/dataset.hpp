#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cocod {

// Row-major point storage: size() points of dim() coordinates each.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, std::size_t count) : dim_(dim), values_(dim * count, 0.0) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }

  std::span<double> point(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> point(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// Plain-text CSV, one point per row, dim columns of decimal reals.
void save_dataset_csv(const Dataset& data, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

struct GeneratorParams {
  std::size_t dimension = 2;
  std::size_t total_points = 512;
  double spread = 1.0;         // within-shard standard deviation (isotropic)
  double shard_offset = 0.0;   // scale of per-shard mean offsets; controls across-shard spread
  bool identical_shards = false;
  bool proportional_data = true;  // shard sizes follow capabilities; else equal split
};

// Draws shard sizes from the capabilities (largest-remainder, matching
// partition_proportional) and fills each shard's contiguous block around its
// own mean. identical_shards replicates one drawn shard across all workers,
// which forces the across-shard variance to exactly zero.
Dataset generate_dataset(const GeneratorParams& params, std::span<const double> capabilities,
                         std::uint64_t seed);

}  // namespace cocod
