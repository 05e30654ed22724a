#include <doctest.h>

#include <cmath>

#include "cocod/allreduce.hpp"
#include "cocod/rng.hpp"

using namespace cocod;

TEST_CASE("three-way mean") {
  std::vector<ModelVector> xs = {{3.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  const std::vector<double> w = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  CommStats stats;
  const auto out = ring_allreduce_weighted(xs, w, &stats);
  for (const auto& r : out) {
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(0.0));
    CHECK(r[2] == doctest::Approx(0.0));
  }
  CHECK(stats.rounds == 1);
  CHECK(stats.steps == 4);
  CHECK_FALSE(stats.non_ring);
}

TEST_CASE("two workers, uneven weights") {
  std::vector<ModelVector> xs = {{0.0, 0.0}, {4.0, 4.0}};
  const std::vector<double> w = {0.25, 0.75};
  CommStats stats;
  const auto out = ring_allreduce_weighted(xs, w, &stats);
  CHECK(out[0][0] == doctest::Approx(3.0));
  CHECK(out[0][1] == doctest::Approx(3.0));
  CHECK(out[1][0] == doctest::Approx(3.0));
  CHECK(stats.steps == 2);  // 2(N-1)
}

TEST_CASE("ring result matches the direct weighted mean on random instances") {
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(counter_draw(trial, 11, 0, 0) % 7);   // 2..8
    const std::size_t d = 8 + counter_draw(trial, 11, 0, 1) % 57;            // 8..64
    std::vector<ModelVector> xs(n, ModelVector(d));
    std::vector<double> w(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] = 0.1 + unit_real(trial, 12, static_cast<std::uint64_t>(i), 0);
      wsum += w[i];
      for (std::size_t c = 0; c < d; ++c)
        xs[i][c] = normal(trial, 13, static_cast<std::uint64_t>(i), c) * 10.0;
    }
    // exact renormalization so the precondition holds
    for (int i = 0; i < n; ++i) w[i] /= wsum;
    double resum = 0.0;
    for (int i = 0; i < n; ++i) resum += w[i];
    w[0] += 1.0 - resum;

    CommStats stats;
    const auto out = ring_allreduce_weighted(xs, w, &stats);

    ModelVector direct(d, 0.0);
    for (int i = 0; i < n; ++i) vec::add_scaled(direct, w[i], xs[i]);
    for (int i = 0; i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) CHECK(std::abs(out[i][c] - direct[c]) <= 1e-12);

    // every worker holds the identical result
    for (int i = 1; i < n; ++i) CHECK(out[i] == out[0]);

    // accounting closed forms
    const long long chunk = static_cast<long long>((d + n - 1) / n);
    CHECK(stats.steps == 2 * (n - 1));
    CHECK(stats.elements_sent == static_cast<long long>(n) * 2 * (n - 1) * chunk);
    CHECK(stats.handshakes == static_cast<long long>(n) * 2 * (n - 1));
  }
}

TEST_CASE("d < N falls back to gather-broadcast with identical result") {
  std::vector<ModelVector> xs = {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, {7.0, 8.0}, {9.0, 10.0}};
  const std::vector<double> w = {0.2, 0.2, 0.2, 0.2, 0.2};
  CommStats stats;
  const auto out = ring_allreduce_weighted(xs, w, &stats);
  CHECK(stats.non_ring);
  ModelVector direct(2, 0.0);
  for (int i = 0; i < 5; ++i) vec::add_scaled(direct, w[i], xs[i]);
  for (const auto& r : out)
    for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(r[c] - direct[c]) <= 1e-12);
}

TEST_CASE("bad weights are rejected") {
  std::vector<ModelVector> xs = {{1.0}, {2.0}};
  const std::vector<double> w = {0.6, 0.6};
  CHECK_THROWS_AS(ring_allreduce_weighted(xs, w), std::invalid_argument);
  std::vector<ModelVector> ragged = {{1.0}, {2.0, 3.0}};
  const std::vector<double> half = {0.5, 0.5};
  CHECK_THROWS_AS(ring_allreduce_weighted(ragged, half), std::invalid_argument);
}

TEST_CASE("comm_duration closed form") {
  CHECK(comm_duration(1, 100, 1.0, 1.0) == 0.0);
  CHECK(comm_duration(2, 10, 0.0, 0.1) == doctest::Approx(1.0));
  CHECK(comm_duration(4, 4, 1.0, 0.0) == doctest::Approx(6.0));
}

TEST_CASE("comm_complexity counts rounds") {
  CHECK(comm_complexity(VariantKind::kCoCoD, 100, 5) == 20);
  CHECK(comm_complexity(VariantKind::kSSGD, 100, 1) == 100);
  CHECK(comm_complexity(VariantKind::kPipeSGD, 100, 7) == 100);
  CHECK(comm_complexity(VariantKind::kCoCoD, 101, 5) == 21);  // final partial period merges
  CHECK(comm_complexity(VariantKind::kLocalSGD, 101, 5) == 21);
}
