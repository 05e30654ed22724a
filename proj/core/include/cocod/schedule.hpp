#pragma once

#include <span>
#include <utility>
#include <vector>

namespace cocod {

// Effective learning rate at a step: scaled base, times a linear warmup ramp,
// divided by decay_factor once per decay point passed.
struct LrSchedule {
  double base = 0.01;
  double scale_factor = 1.0;  // resolved: 1, N, or sum(C_i)/C_ref
  long long warmup_steps = 0;
  std::vector<long long> decay_steps;  // sorted step indices
  double decay_factor = 10.0;

  double at(long long step) const {
    double gamma = base * scale_factor;
    if (warmup_steps > 0 && step < warmup_steps)
      gamma *= static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
    for (long long d : decay_steps) {
      if (step >= d) gamma /= decay_factor;
    }
    return gamma;
  }

  static LrSchedule fixed(double gamma) { return LrSchedule{gamma, 1.0, 0, {}, 10.0}; }
};

// Scaled-learning-rate rule for N workers: gamma_N = (sum_i C_i / C_ref) * gamma_1,
// which reduces to N * gamma_1 when capabilities are equal. The reference
// worker is the first one.
double scaled_lr(double gamma_1, std::span<const double> capabilities);

// Step-indexed communication period: piecewise-constant k.
struct PeriodSchedule {
  // (start_step, k) pairs, ascending; first entry applies from step 0
  std::vector<std::pair<long long, int>> points{{0, 1}};

  int at(long long step) const {
    int k = points.front().second;
    for (const auto& [start, value] : points) {
      if (step >= start) k = value;
    }
    return k;
  }

  bool constant() const { return points.size() == 1; }

  static PeriodSchedule constant_k(int k) { return PeriodSchedule{{{0, k}}}; }
};

}  // namespace cocod
