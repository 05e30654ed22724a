#include <benchmark/benchmark.h>

#include "cocod/allreduce.hpp"
#include "cocod/rng.hpp"

namespace {

void BM_RingAllreduce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::size_t dim = static_cast<std::size_t>(state.range(1));
  std::vector<cocod::ModelVector> xs(n, cocod::ModelVector(dim));
  std::vector<double> w(n, 1.0 / n);
  double resum = 0.0;
  for (int i = 0; i < n; ++i) resum += w[i];
  w[0] += 1.0 - resum;
  for (int i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) xs[i][c] = cocod::normal(1, i, 0, c);

  for (auto _ : state) {
    cocod::CommStats stats;
    benchmark::DoNotOptimize(cocod::ring_allreduce_weighted(xs, w, &stats));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(n) *
                          static_cast<long long>(dim));
}

}  // namespace

BENCHMARK(BM_RingAllreduce)
    ->Args({4, 1024})
    ->Args({8, 1024})
    ->Args({8, 65536})
    ->Args({16, 65536});
