#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>

#include "cocod/dataset.hpp"
#include "cocod/partition.hpp"
#include "cocod/rng.hpp"
#include "cocod/vec.hpp"

using namespace cocod;

namespace {

Dataset points_dataset(std::size_t dim, std::initializer_list<std::initializer_list<double>> pts) {
  Dataset d(dim, pts.size());
  std::size_t i = 0;
  for (const auto& p : pts) {
    std::size_t c = 0;
    for (double v : p) d.point(i)[c++] = v;
    ++i;
  }
  return d;
}

}  // namespace

TEST_CASE("equal capabilities split evenly") {
  const Dataset d = points_dataset(1, {{0.0}, {1.0}, {2.0}, {3.0}});
  const double caps[] = {1.0, 1.0};
  const Partition p = partition_proportional(d, caps);
  CHECK(p.shards[0].size() == 2);
  CHECK(p.shards[1].size() == 2);
  CHECK(p.weights[0] == doctest::Approx(0.5));
  CHECK(p.weights[1] == doctest::Approx(0.5));
}

TEST_CASE("largest-remainder split follows capability ratio") {
  const Dataset d = points_dataset(1, {{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}});
  const double caps[] = {1.0, 2.0};
  const Partition p = partition_proportional(d, caps);
  CHECK(p.shards[0].size() == 2);
  CHECK(p.shards[1].size() == 4);
  CHECK(p.weights[0] == doctest::Approx(1.0 / 3));
  CHECK(p.weights[1] == doctest::Approx(2.0 / 3));
}

TEST_CASE("fewer points than workers is rejected") {
  const Dataset d = points_dataset(1, {{0.0}});
  const double caps[] = {1.0, 1.0};
  CHECK_THROWS_WITH_AS(partition_proportional(d, caps), "insufficient data",
                       std::invalid_argument);
}

TEST_CASE("partitions are disjoint, exhaustive, and weights sum to one") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + counter_draw(seed, 1, 0, 0) % 7;
    const std::size_t total = n + counter_draw(seed, 1, 0, 1) % 200;
    std::vector<double> caps(n);
    for (std::size_t i = 0; i < n; ++i) caps[i] = 0.25 + unit_real(seed, 1, 1, i) * 4.0;
    Dataset d(2, total);
    const Partition p = partition_proportional(d, caps);

    std::set<std::size_t> seen;
    std::size_t count = 0;
    for (const auto& shard : p.shards) {
      for (std::size_t row : shard) {
        CHECK(seen.insert(row).second);  // disjoint
        ++count;
      }
    }
    CHECK(count == total);  // exhaustive
    double wsum = 0.0;
    for (double w : p.weights) wsum += w;
    CHECK(std::abs(wsum - 1.0) <= 1e-12);

    // proportionality up to rounding: realized size within 1 of the quota
    double cap_sum = std::accumulate(caps.begin(), caps.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double quota = static_cast<double>(total) * caps[i] / cap_sum;
      CHECK(std::abs(static_cast<double>(p.shards[i].size()) - quota) < 1.0 + 1e-9);
    }
  }
}

TEST_CASE("proportional batch sizes") {
  const double het[] = {1.0, 2.0};
  CHECK(batch_sizes_proportional(32, het) == std::vector<int>{32, 64});
  const double hom[] = {1.0, 1.0, 1.0};
  CHECK(batch_sizes_proportional(32, hom) == std::vector<int>{32, 32, 32});
  // round(3 * 1.5) = round(4.5) -> 5, half away from zero
  const double odd[] = {2.0, 3.0};
  CHECK(batch_sizes_proportional(3, odd) == std::vector<int>{3, 5});
  CHECK_THROWS_AS(batch_sizes_proportional(0, hom), std::invalid_argument);
}

TEST_CASE("generated shards follow configured sizes and offsets") {
  GeneratorParams params;
  params.dimension = 3;
  params.total_points = 90;
  params.spread = 0.5;
  params.shard_offset = 4.0;
  const double caps[] = {1.0, 2.0};
  const Dataset d = generate_dataset(params, caps, 99);
  CHECK(d.size() == 90);
  CHECK(d.dim() == 3);
  const Partition p = partition_proportional(d, caps);
  CHECK(p.shards[0].size() == 30);
  CHECK(p.shards[1].size() == 60);

  // with a large offset the shard means must be far apart
  ModelVector m0(3, 0.0), m1(3, 0.0);
  for (std::size_t r : p.shards[0]) vec::add_scaled(m0, 1.0 / 30, d.point(r));
  for (std::size_t r : p.shards[1]) vec::add_scaled(m1, 1.0 / 60, d.point(r));
  CHECK(vec::dist_sq(m0, m1) > 1.0);
}

TEST_CASE("identical shards really are identical") {
  GeneratorParams params;
  params.dimension = 2;
  params.total_points = 40;
  params.identical_shards = true;
  const double caps[] = {1.0, 1.0};
  const Dataset d = generate_dataset(params, caps, 5);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(d.point(i)[0] == d.point(20 + i)[0]);
    CHECK(d.point(i)[1] == d.point(20 + i)[1]);
  }
}

TEST_CASE("dataset csv round trip is exact") {
  GeneratorParams params;
  params.dimension = 4;
  params.total_points = 25;
  const double caps[] = {1.0};
  const Dataset d = generate_dataset(params, caps, 11);
  const auto path = std::filesystem::temp_directory_path() / "cocod_test_dataset.csv";
  save_dataset_csv(d, path.string());
  const Dataset back = load_dataset_csv(path.string());
  REQUIRE(back.size() == d.size());
  REQUIRE(back.dim() == d.dim());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t c = 0; c < d.dim(); ++c) CHECK(back.point(i)[c] == d.point(i)[c]);
  std::filesystem::remove(path);
}
