#include <benchmark/benchmark.h>

#include "cocod/engine.hpp"

namespace {

struct BenchSetup {
  cocod::Dataset data;
  cocod::Partition part;
  std::unique_ptr<cocod::QuadraticObjective> obj;
  cocod::CostModel cost;

  BenchSetup(std::size_t dim, int n) {
    cocod::GeneratorParams params;
    params.dimension = dim;
    params.total_points = static_cast<std::size_t>(n) * 64;
    params.shard_offset = 0.5;
    const std::vector<double> caps(n, 1.0);
    data = cocod::generate_dataset(params, caps, 7);
    part = cocod::partition_proportional(data, caps);
    cocod::assign_batch_sizes(part, 8, true);
    obj = std::make_unique<cocod::QuadraticObjective>(data);
    cost.capabilities = caps;
  }
};

void BM_SimulateRun(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::size_t dim = static_cast<std::size_t>(state.range(1));
  const auto kind = static_cast<cocod::VariantKind>(state.range(2));
  BenchSetup setup(dim, n);
  cocod::AlgorithmVariant variant;
  variant.kind = kind;
  variant.period = cocod::PeriodSchedule::constant_k(5);
  const long long steps = 500;

  for (auto _ : state) {
    benchmark::DoNotOptimize(cocod::simulate_run(*setup.obj, setup.part, variant, setup.cost,
                                                 cocod::LrSchedule::fixed(0.01), steps, 3,
                                                 cocod::ModelVector(dim, 1.0)));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}

}  // namespace

BENCHMARK(BM_SimulateRun)
    ->Args({4, 64, static_cast<long>(cocod::VariantKind::kSSGD)})
    ->Args({4, 64, static_cast<long>(cocod::VariantKind::kCoCoD)})
    ->Args({8, 256, static_cast<long>(cocod::VariantKind::kCoCoD)})
    ->Args({8, 256, static_cast<long>(cocod::VariantKind::kLocalSGD)});
