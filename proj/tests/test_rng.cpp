#include <doctest.h>

#include <cmath>
#include <vector>

#include "cocod/rng.hpp"

using namespace cocod;

TEST_CASE("identical cursors give identical draws") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(counter_draw(1, 2, 3, i) == counter_draw(1, 2, 3, i));
  }
  CHECK(counter_draw(1, 2, 3, 4) != counter_draw(2, 2, 3, 4));
  CHECK(counter_draw(1, 2, 3, 4) != counter_draw(1, 3, 3, 4));
  CHECK(counter_draw(1, 2, 3, 4) != counter_draw(1, 2, 4, 4));
}

TEST_CASE("unit_real stays in [0,1) and unit_real_pos in (0,1]") {
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = unit_real(9, 1, 0, i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = unit_real_pos(9, 1, 0, i);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("bounded_index covers the range roughly uniformly") {
  const std::size_t bound = 7;
  std::vector<int> counts(bound, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i)
    counts[bounded_index(123, 5, 0, static_cast<std::uint64_t>(i), bound)] += 1;
  for (std::size_t b = 0; b < bound; ++b) {
    CHECK(counts[b] > draws / static_cast<int>(bound) - 600);
    CHECK(counts[b] < draws / static_cast<int>(bound) + 600);
  }
}

TEST_CASE("normal draws have near-standard moments") {
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    const double z = normal(77, 2, 0, static_cast<std::uint64_t>(i));
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("derived seeds decouple stream families") {
  const auto a = derive_seed(42, kDatasetSeedTag);
  const auto b = derive_seed(42, kSamplingSeedTag);
  CHECK(a != b);
  CHECK(derive_seed(42, kDatasetSeedTag) == a);
}
