#pragma once

#include <stdexcept>
#include <vector>

namespace cocod {

// Parametric hardware cost model: compute scales with the batch size and
// inversely with the worker's capability; communication follows the ring
// alpha/beta form; `overlap` is the fraction of a communication round's cost
// charged to wall time when it runs concurrently with computation.
struct CostModel {
  double per_sample_time = 1e-3;  // seconds per sample per unit capability
  std::vector<double> capabilities;
  double alpha = 0.0;  // seconds per ring step
  double beta = 0.0;   // seconds per vector element
  double overlap = 1.0;
  double jitter = 0.0;  // multiplicative compute-time noise; timing only, default off

  void validate() const {
    if (!(per_sample_time > 0.0)) throw std::invalid_argument("per_sample_time must be > 0");
    if (overlap < 0.0 || overlap > 1.0) throw std::invalid_argument("overlap must be in [0, 1]");
    if (jitter < 0.0 || jitter >= 1.0) throw std::invalid_argument("jitter must be in [0, 1)");
    for (double c : capabilities)
      if (!(c > 0.0)) throw std::invalid_argument("capabilities must be positive");
  }
};

inline double compute_time(const CostModel& cost, int worker, int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  return cost.per_sample_time * static_cast<double>(batch_size) / cost.capabilities[worker];
}

}  // namespace cocod
