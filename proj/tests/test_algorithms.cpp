#include <doctest.h>

#include <cmath>

#include "cocod/algorithms.hpp"
#include "cocod/reference.hpp"
#include "cocod/rng.hpp"
#include "cocod/schedule.hpp"

using namespace cocod;

namespace {

struct Fixture {
  Dataset data;
  Partition part;
  std::unique_ptr<QuadraticObjective> obj;

  Fixture(std::size_t dim, std::size_t points, std::vector<double> caps, int base_batch,
          std::uint64_t seed, double offset = 0.5, bool identical = false) {
    GeneratorParams params;
    params.dimension = dim;
    params.total_points = points;
    params.shard_offset = offset;
    params.identical_shards = identical;
    data = generate_dataset(params, caps, seed);
    part = partition_proportional(data, caps);
    assign_batch_sizes(part, base_batch, true);
    obj = std::make_unique<QuadraticObjective>(data);
  }
};

// collects the weighted-mean trajectory
class MeanTracker final : public StepObserver {
 public:
  std::vector<ModelVector> means;
  void on_step(long long, std::span<const ModelVector>, std::span<const double> x_hat) override {
    means.emplace_back(x_hat.begin(), x_hat.end());
  }
};

}  // namespace

TEST_CASE("weighted mean examples") {
  {
    const std::vector<ModelVector> xs = {{0.0}, {4.0}};
    const std::vector<int> m = {1, 3};
    CHECK(weighted_mean(xs, m)[0] == doctest::Approx(3.0));
  }
  {
    const std::vector<ModelVector> xs = {{4.0}, {0.0}, {2.0}};
    const std::vector<int> m = {1, 1, 2};
    CHECK(weighted_mean(xs, m)[0] == doctest::Approx(2.0));
  }
  {
    const std::vector<ModelVector> xs = {{1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}};
    const std::vector<int> m = {5, 1, 2};
    const ModelVector r = weighted_mean(xs, m);
    CHECK(r[0] == doctest::Approx(1.5));
    CHECK(r[1] == doctest::Approx(-2.0));
  }
  const std::vector<ModelVector> ragged = {{1.0}, {2.0, 3.0}};
  const std::vector<int> m = {1, 1};
  CHECK_THROWS_AS(weighted_mean(ragged, m), std::invalid_argument);
}

TEST_CASE("merge arithmetic") {
  WorkerState w;
  w.x = {2.0, 0.0};
  w.snapshot = ModelVector{0.0, 0.0};
  const ModelVector x_hat = {1.0, 1.0};
  merge_drift(w, x_hat);
  CHECK(w.x[0] == doctest::Approx(3.0));
  CHECK(w.x[1] == doctest::Approx(1.0));
  CHECK_FALSE(w.snapshot.has_value());
}

TEST_CASE("divergence metric") {
  Fixture f(1, 8, {1.0, 1.0}, 2, 1);
  auto states = make_worker_states(2, {0.0});
  states[0].x = {0.0};
  states[1].x = {2.0};
  const ModelVector x_hat = {1.0};
  CHECK(divergence_metric(states, f.part, x_hat) == doctest::Approx(1.0));
  states[1].x = {0.0};
  const ModelVector same = {0.0};
  CHECK(divergence_metric(states, f.part, same) == doctest::Approx(0.0));
}

TEST_CASE("merge preserves the weighted mean; post-merge divergence is the drift spread") {
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(counter_draw(trial, 21, 0, 0) % 7);
    const std::size_t d = 2 + counter_draw(trial, 21, 0, 1) % 15;
    std::vector<double> caps(n, 1.0);
    Fixture f(d, static_cast<std::size_t>(n) * 8, caps, 4, trial);

    std::vector<WorkerState> states(n);
    std::vector<ModelVector> models(n), drifts(n);
    for (int i = 0; i < n; ++i) {
      states[i].worker_id = i;
      states[i].x.resize(d);
      states[i].snapshot.emplace(d);
      for (std::size_t c = 0; c < d; ++c) {
        states[i].x[c] = normal(trial, 22, static_cast<std::uint64_t>(i), c);
        (*states[i].snapshot)[c] = normal(trial, 23, static_cast<std::uint64_t>(i), c);
      }
      models[i] = states[i].x;
      drifts[i].resize(d);
      vec::sub(states[i].x, *states[i].snapshot, drifts[i]);
    }
    // x_hat as in a real round: the weighted mean of the snapshots
    std::vector<ModelVector> snaps(n);
    for (int i = 0; i < n; ++i) snaps[i] = *states[i].snapshot;
    const ModelVector x_hat = weighted_mean(snaps, f.part.batch_sizes);

    const ModelVector before = weighted_mean(models, f.part.batch_sizes);
    for (auto& s : states) merge_drift(s, x_hat);
    for (int i = 0; i < n; ++i) models[i] = states[i].x;
    const ModelVector after = weighted_mean(models, f.part.batch_sizes);

    // line 6 keeps the batch-weighted mean fixed ...
    for (std::size_t c = 0; c < d; ++c) CHECK(std::abs(after[c] - before[c]) <= 1e-12);

    // ... and leaves the models spread exactly like their drifts
    const ModelVector drift_mean = weighted_mean(drifts, f.part.batch_sizes);
    const std::vector<double> w = f.part.batch_weights();
    double drift_spread = 0.0;
    for (int i = 0; i < n; ++i) drift_spread += w[i] * vec::dist_sq(drift_mean, drifts[i]);
    const double div_after = divergence_metric(states, f.part, after);
    CHECK(div_after == doctest::Approx(drift_spread).epsilon(1e-9));
  }
}

TEST_CASE("ssgd fixed points and zero step") {
  Fixture f(3, 48, {1.0, 1.0, 1.0}, 4, 5);
  auto states = make_worker_states(3, {1.0, -1.0, 0.5});
  const ModelVector before = states[0].x;

  // gamma = 0 leaves the model unchanged
  ssgd_step(states, *f.obj, f.part, LrSchedule::fixed(0.0), 0, 99);
  CHECK(states[0].x == before);
  CHECK(states[1].x == before);

  // full batches at the global mean: stationary
  LocalUpdateOptions full;
  full.full_batch = true;
  auto at_mean = make_worker_states(3, ModelVector(f.obj->global_mean().begin(),
                                                   f.obj->global_mean().end()));
  // identical shards would be stationary exactly; with distinct shards the
  // weighted average of shard gradients at the global mean still vanishes
  // only when weights match shard fractions, which proportional batching does
  ssgd_step(at_mean, *f.obj, f.part, LrSchedule::fixed(0.5), 0, 99, full);
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(std::abs(at_mean[0].x[c] - f.obj->global_mean()[c]) <= 1e-12);
}

TEST_CASE("one worker with a full-shard batch is plain gradient descent") {
  Fixture f(2, 16, {1.0}, 16, 6);
  LocalUpdateOptions full;
  full.full_batch = true;
  auto states = make_worker_states(1, {4.0, -2.0});
  ModelVector x = states[0].x;
  const double gamma = 0.3;
  for (long long t = 0; t < 20; ++t) {
    ssgd_step(states, *f.obj, f.part, LrSchedule::fixed(gamma), t, 7, full);
    // hand GD on f(x) = 0.5||x - mean||^2 + f*
    for (std::size_t c = 0; c < 2; ++c) x[c] -= gamma * (x[c] - f.obj->global_mean()[c]);
  }
  for (std::size_t c = 0; c < 2; ++c) CHECK(states[0].x[c] == doctest::Approx(x[c]));
}

TEST_CASE("local round with one worker is plain SGD") {
  Fixture f(2, 16, {1.0}, 4, 8);
  auto a = make_worker_states(1, {2.0, 2.0});
  auto b = make_worker_states(1, {2.0, 2.0});
  const LrSchedule lr = LrSchedule::fixed(0.1);
  CommStats stats;
  local_sgd_round(a, *f.obj, f.part, lr, 0, 5, 33, {}, &stats);
  for (long long t = 0; t < 5; ++t) local_step(b[0], *f.obj, f.part, lr.at(t), t, 33);
  CHECK(a[0].x == b[0].x);
  CHECK(stats.rounds == 0);  // nothing to communicate
}

TEST_CASE("local-sgd with k=1 matches ssgd under the same streams") {
  Fixture f(4, 64, {1.0, 1.0, 1.0, 1.0}, 8, 9);
  const LrSchedule lr = LrSchedule::fixed(0.05);
  auto ssgd_states = make_worker_states(4, {1.0, 1.0, 1.0, 1.0});
  auto local_states = make_worker_states(4, {1.0, 1.0, 1.0, 1.0});
  for (long long t = 0; t < 200; ++t) {
    ssgd_step(ssgd_states, *f.obj, f.part, lr, t, 1234);
    local_sgd_round(local_states, *f.obj, f.part, lr, t, 1, 1234);
    const ModelVector ma = weighted_mean(
        std::vector<ModelVector>{ssgd_states[0].x, ssgd_states[1].x, ssgd_states[2].x,
                                 ssgd_states[3].x},
        f.part.batch_sizes);
    const ModelVector mb = weighted_mean(
        std::vector<ModelVector>{local_states[0].x, local_states[1].x, local_states[2].x,
                                 local_states[3].x},
        f.part.batch_sizes);
    for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(ma[c] - mb[c]) <= 1e-12);
  }
}

TEST_CASE("cocod merge example and zero-gradient collapse") {
  Fixture f(2, 32, {1.0, 1.0}, 4, 10, /*offset=*/0.0, /*identical=*/true);
  // zero gradients: x0 at the shard mean with full batches; all models become x_hat
  LocalUpdateOptions full;
  full.full_batch = true;
  const ModelVector mean(f.obj->global_mean().begin(), f.obj->global_mean().end());
  auto states = make_worker_states(2, mean);
  const auto record = cocod_round(states, *f.obj, f.part, LrSchedule::fixed(0.2), 0, 3, 55, full);
  for (const auto& s : states)
    for (std::size_t c = 0; c < 2; ++c) CHECK(s.x[c] == doctest::Approx(record.x_hat[c]));
  CHECK(record.merge_step - record.start_step == 3);
}

TEST_CASE("cocod round boundary matches the accumulated-gradient form") {
  for (std::uint64_t trial = 0; trial < 12; ++trial) {
    const int n = 2 + static_cast<int>(trial % 3);
    std::vector<double> caps(n, 1.0);
    caps[0] = 2.0;  // heterogeneous batches exercise the weighting
    Fixture f(3, 60, caps, 4, 100 + trial);
    const LrSchedule lr = LrSchedule::fixed(0.04);

    auto states = make_worker_states(n, {1.0, 1.0, 1.0});
    StepLog log;
    CommStats stats;
    long long t = 0;
    const int k = 4;
    std::vector<ModelVector> boundary_means;
    {
      std::vector<ModelVector> ms;
      for (const auto& s : states) ms.push_back(s.x);
      boundary_means.push_back(weighted_mean(ms, f.part.batch_sizes));
    }
    for (int round = 0; round < 5; ++round) {
      cocod_round(states, *f.obj, f.part, lr, t, k, 777 + trial, {}, &stats, &log);
      t += k;
      std::vector<ModelVector> ms;
      for (const auto& s : states) ms.push_back(s.x);
      boundary_means.push_back(weighted_mean(ms, f.part.batch_sizes));
    }
    // x_hat at boundary r+1 = x_hat at boundary r - sum of gamma * averaged gradients
    for (int round = 0; round < 5; ++round) {
      ModelVector expect = boundary_means[round];
      for (int j = 0; j < k; ++j) {
        const std::size_t step = static_cast<std::size_t>(round * k + j);
        vec::add_scaled(expect, -log.gamma[step], log.weighted[step]);
      }
      for (std::size_t c = 0; c < 3; ++c)
        CHECK(std::abs(expect[c] - boundary_means[round + 1][c]) <= 1e-10);
    }
  }
}

TEST_CASE("local models equal their last merged base plus accumulated steps") {
  const int n = 3;
  Fixture f(2, 48, {1.0, 1.0, 2.0}, 4, 200);
  const LrSchedule lr = LrSchedule::fixed(0.03);
  auto states = make_worker_states(n, {2.0, -1.0});

  StepLog log;
  log.per_worker = true;
  const int k = 3;
  ModelVector base(states[0].x);  // x_hat of the last completed round
  std::vector<ModelVector> prev_snaps;
  long long t = 0;
  for (int round = 0; round < 4; ++round) {
    const auto record = cocod_round(states, *f.obj, f.part, lr, t, k, 909, {}, nullptr, &log);
    t += k;
    // after the merge: x_{t+k}^i = x_hat_t - sum_{tau in round} gamma G_tau^i
    for (int i = 0; i < n; ++i) {
      ModelVector expect = record.x_hat;
      for (int j = 0; j < k; ++j) {
        const std::size_t step = static_cast<std::size_t>(round * k + j);
        vec::add_scaled(expect, -log.gamma[step], log.worker[step][i]);
      }
      for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(expect[c] - states[i].x[c]) <= 1e-10);
    }
  }
}

TEST_CASE("pipe-sgd warm fill and staleness") {
  Fixture f(2, 32, {1.0, 1.0}, 4, 11);
  const ModelVector x0 = {3.0, 3.0};

  // T=1 with staleness 1: pipeline never drains, model unchanged
  {
    auto states = make_worker_states(2, x0);
    GradientPipeline pipe{1, {}};
    pipe_sgd_step(states, pipe, *f.obj, f.part, LrSchedule::fixed(0.1), 0, 42);
    CHECK(states[0].x == x0);
    CHECK(pipe.pending.size() == 1);
  }

  // gamma = 0 keeps the model constant forever
  {
    auto states = make_worker_states(2, x0);
    GradientPipeline pipe{1, {}};
    for (long long t = 0; t < 10; ++t)
      pipe_sgd_step(states, pipe, *f.obj, f.part, LrSchedule::fixed(0.0), t, 42);
    CHECK(states[0].x == x0);
  }

  // constant gradient field: after warm fill the model drops by gamma*c per
  // step, exactly one step behind ssgd
  {
    LocalUpdateOptions full;
    full.full_batch = true;
    Fixture ident(1, 16, {1.0, 1.0}, 4, 12, 0.0, true);
    auto pipe_states = make_worker_states(2, {10.0});
    auto ssgd_states = make_worker_states(2, {10.0});
    GradientPipeline pipe{1, {}};
    const LrSchedule lr = LrSchedule::fixed(0.1);
    std::vector<double> pipe_traj, ssgd_traj;
    for (long long t = 0; t < 12; ++t) {
      pipe_traj.push_back(pipe_states[0].x[0]);
      ssgd_traj.push_back(ssgd_states[0].x[0]);
      pipe_sgd_step(pipe_states, pipe, *ident.obj, ident.part, lr, t, 5, full);
      ssgd_step(ssgd_states, *ident.obj, ident.part, lr, t, 5, full);
    }
    // not an exact lag in general (the gradient field varies), but the first
    // update is skipped
    CHECK(pipe_traj[1] == doctest::Approx(pipe_traj[0]));
    CHECK(ssgd_traj[1] != doctest::Approx(ssgd_traj[0]));
  }
}

TEST_CASE("pipe-sgd realizes the stale-gradient recursion exactly") {
  // full batches, identical shards: g_t = x_t - mu, so with staleness 1 the
  // model must satisfy x_{t+1} = x_t - gamma (x_{t-1} - mu) after warm fill
  Fixture f(2, 24, {1.0, 1.0}, 4, 17, 0.0, /*identical=*/true);
  LocalUpdateOptions full;
  full.full_batch = true;
  const double gamma = 0.2;
  auto states = make_worker_states(2, {7.0, -3.0});
  GradientPipeline pipe{1, {}};
  std::vector<ModelVector> traj = {states[0].x};
  for (long long t = 0; t < 30; ++t) {
    pipe_sgd_step(states, pipe, *f.obj, f.part, LrSchedule::fixed(gamma), t, 2, full);
    traj.push_back(states[0].x);
  }
  CHECK(traj[1] == traj[0]);  // warm fill
  const auto mean = f.obj->global_mean();
  for (std::size_t t = 1; t + 1 < traj.size(); ++t)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(traj[t + 1][c] ==
            doctest::Approx(traj[t][c] - gamma * (traj[t - 1][c] - mean[c])).epsilon(1e-12));
}

TEST_CASE("deeper pipelines delay the first update accordingly") {
  Fixture f(2, 32, {1.0, 1.0}, 4, 16);
  auto states = make_worker_states(2, {5.0, 5.0});
  GradientPipeline pipe{3, {}};
  const LrSchedule lr = LrSchedule::fixed(0.1);
  const ModelVector x0 = states[0].x;
  for (long long t = 0; t < 3; ++t) {
    pipe_sgd_step(states, pipe, *f.obj, f.part, lr, t, 4);
    CHECK(states[0].x == x0);  // still warm-filling
  }
  pipe_sgd_step(states, pipe, *f.obj, f.part, lr, 3, 4);
  CHECK(states[0].x != x0);
  CHECK(pipe.pending.size() == 3);  // depth stays at the staleness
}

TEST_CASE("zero-variance collapse: ssgd, local, cocod all follow deterministic gd") {
  Fixture f(2, 32, {1.0, 1.0}, 4, 13, 0.0, /*identical=*/true);
  LocalUpdateOptions full;
  full.full_batch = true;
  const LrSchedule lr = LrSchedule::fixed(0.15);
  const ModelVector x0 = {5.0, -3.0};
  const int k = 4;
  const long long T = 100;

  auto s_ssgd = make_worker_states(2, x0);
  auto s_local = make_worker_states(2, x0);
  auto s_cocod = make_worker_states(2, x0);
  GradientPipeline unused{1, {}};

  ModelVector gd = x0;
  for (long long t = 0; t < T; ++t) {
    ssgd_step(s_ssgd, *f.obj, f.part, lr, t, 21, full);
    for (std::size_t c = 0; c < 2; ++c) gd[c] -= lr.at(t) * (gd[c] - f.obj->global_mean()[c]);
  }
  for (long long t = 0; t < T; t += k) {
    local_sgd_round(s_local, *f.obj, f.part, lr, t, k, 21, full);
    cocod_round(s_cocod, *f.obj, f.part, lr, t, k, 21, full);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(std::abs(s_ssgd[0].x[c] - gd[c]) <= 1e-12);
    CHECK(std::abs(s_local[0].x[c] - gd[c]) <= 1e-12);
    CHECK(std::abs(s_cocod[0].x[c] - gd[c]) <= 1e-12);
    CHECK(std::abs(s_cocod[1].x[c] - gd[c]) <= 1e-12);
  }
}

TEST_CASE("momentum and weight decay change the trajectory only when enabled") {
  Fixture f(2, 32, {1.0, 1.0}, 4, 14);
  const LrSchedule lr = LrSchedule::fixed(0.05);
  auto plain = make_worker_states(2, {1.0, 1.0});
  auto heavy = make_worker_states(2, {1.0, 1.0});
  LocalUpdateOptions momentum;
  momentum.momentum = 0.9;
  for (long long t = 0; t < 10; ++t) {
    ssgd_step(plain, *f.obj, f.part, lr, t, 3);
    ssgd_step(heavy, *f.obj, f.part, lr, t, 3, momentum);
  }
  CHECK(plain[0].x != heavy[0].x);

  auto zero_m = make_worker_states(2, {1.0, 1.0});
  LocalUpdateOptions off;
  off.momentum = 0.0;
  for (long long t = 0; t < 10; ++t) ssgd_step(zero_m, *f.obj, f.part, lr, t, 3, off);
  CHECK(zero_m[0].x == plain[0].x);
}

TEST_CASE("learning-rate schedule") {
  // homogeneous scaling: 16 workers at base 0.01 -> 0.16
  {
    LrSchedule lr;
    lr.base = 0.01;
    lr.scale_factor = 16.0;
    CHECK(lr.at(0) == doctest::Approx(0.16));
  }
  // heterogeneous scaling: 8 workers at C=1 plus 8 at C=2 -> 0.24
  {
    std::vector<double> caps(16, 1.0);
    for (int i = 8; i < 16; ++i) caps[i] = 2.0;
    CHECK(scaled_lr(0.01, caps) == doctest::Approx(0.24));
    const std::vector<double> one = {3.0};
    CHECK(scaled_lr(0.01, one) == doctest::Approx(0.01));
  }
  // decay by a factor of 10 past the decay point
  {
    LrSchedule lr;
    lr.base = 0.2;
    lr.decay_steps = {100};
    lr.decay_factor = 10.0;
    CHECK(lr.at(99) == doctest::Approx(0.2));
    CHECK(lr.at(100) == doctest::Approx(0.02));
    CHECK(lr.at(5000) == doctest::Approx(0.02));
  }
  // linear warmup reaches the full rate at warmup_steps
  {
    LrSchedule lr;
    lr.base = 0.1;
    lr.warmup_steps = 4;
    CHECK(lr.at(0) == doctest::Approx(0.025));
    CHECK(lr.at(1) == doctest::Approx(0.05));
    CHECK(lr.at(3) == doctest::Approx(0.1));
    CHECK(lr.at(4) == doctest::Approx(0.1));
  }
}

TEST_CASE("period schedule switches at its boundaries") {
  PeriodSchedule sched;
  sched.points = {{0, 1}, {10, 5}};
  CHECK(sched.at(0) == 1);
  CHECK(sched.at(9) == 1);
  CHECK(sched.at(10) == 5);
  CHECK(sched.at(500) == 5);
  CHECK_FALSE(sched.constant());
  CHECK(PeriodSchedule::constant_k(3).constant());
}

TEST_CASE("reference run counts rounds like the closed form") {
  Fixture f(3, 60, {1.0, 1.0, 1.0}, 4, 15);
  const LrSchedule lr = LrSchedule::fixed(0.02);
  for (const auto kind : {VariantKind::kSSGD, VariantKind::kPipeSGD, VariantKind::kLocalSGD,
                          VariantKind::kCoCoD}) {
    AlgorithmVariant variant;
    variant.kind = kind;
    variant.period = PeriodSchedule::constant_k(5);
    const long long T = 101;
    const CommStats stats =
        reference_run(*f.obj, f.part, variant, lr, T, 42, {0.5, 0.5, 0.5});
    CHECK(stats.rounds == comm_complexity(kind, T, 5));
  }
}
