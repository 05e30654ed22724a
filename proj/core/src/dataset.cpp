#include "cocod/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "cocod/partition.hpp"
#include "cocod/rng.hpp"
#include "cocod/vec.hpp"

namespace cocod {

namespace {

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

}  // namespace

void save_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = data.point(i);
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (c) out << ',';
      out << format_real(p[c]);
    }
    out << '\n';
  }
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      double v = 0.0;
      const auto res = std::from_chars(line.data() + pos, line.data() + comma, v);
      if (res.ec != std::errc{}) throw std::runtime_error("bad number in " + path);
      row.push_back(v);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim) throw std::runtime_error("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty dataset: " + path);
  Dataset data(dim, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto p = data.point(i);
    for (std::size_t c = 0; c < dim; ++c) p[c] = rows[i][c];
    if (!vec::all_finite(p)) throw std::runtime_error("nonfinite value in " + path);
  }
  return data;
}

Dataset generate_dataset(const GeneratorParams& params, std::span<const double> capabilities,
                         std::uint64_t seed) {
  const std::size_t n = capabilities.size();
  if (n == 0) throw std::invalid_argument("no workers");
  if (params.total_points < n) throw std::invalid_argument("insufficient data");

  std::vector<std::size_t> sizes;
  if (params.identical_shards) {
    for (double c : capabilities)
      if (c != capabilities[0])
        throw std::invalid_argument("identical_shards requires homogeneous capabilities");
    if (params.total_points % n != 0)
      throw std::invalid_argument("identical_shards requires total_points divisible by workers");
    sizes.assign(n, params.total_points / n);
  } else {
    sizes = proportional_shard_sizes(params.total_points,
                                     params.proportional_data
                                         ? capabilities
                                         : std::span<const double>{},
                                     n);
  }

  Dataset data(params.dimension, params.total_points);
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // identical_shards: every worker replays worker 0's streams with mean 0
    const std::uint64_t shard = params.identical_shards ? 0 : i;
    std::vector<double> mean(params.dimension, 0.0);
    if (!params.identical_shards && params.shard_offset != 0.0) {
      for (std::size_t c = 0; c < params.dimension; ++c)
        mean[c] = params.shard_offset * normal(seed, stream_id(StreamKind::kShardMeans, shard), 0, c);
    }
    for (std::size_t p = 0; p < sizes[i]; ++p, ++row) {
      auto dst = data.point(row);
      for (std::size_t c = 0; c < params.dimension; ++c)
        dst[c] = mean[c] +
                 params.spread * normal(seed, stream_id(StreamKind::kDataPoints, shard), p, c);
    }
  }
  return data;
}

}  // namespace cocod
