#pragma once

#include <memory>
#include <span>
#include <string>

#include "cocod/dataset.hpp"
#include "cocod/partition.hpp"
#include "cocod/vec.hpp"

namespace cocod {

// Per-point loss family over a dataset. The full objective is the mean of
// point_loss over the dataset, equivalently the p_i-weighted mean of the
// per-shard means.
class Objective {
 public:
  virtual ~Objective() = default;

  std::size_t dim() const { return data_->dim(); }
  const Dataset& data() const { return *data_; }

  virtual double point_loss(std::span<const double> x, std::span<const double> point) const = 0;
  // acc += scale * grad_x f(x, point)
  virtual void add_point_gradient(std::span<const double> x, std::span<const double> point,
                                  double scale, std::span<double> acc) const = 0;

  // Full-dataset statistics at x. The generic paths are O(|D| d); the
  // quadratic overrides them with closed forms.
  virtual double global_loss(std::span<const double> x) const;
  virtual double global_grad_norm_sq(std::span<const double> x) const;

 protected:
  explicit Objective(const Dataset& data) : data_(&data) {}
  const Dataset* data_;
};

// f(x, xi) = 0.5 ||x - xi||^2, so grad f = x - xi and the shard gradient has
// the closed form x - shard_mean.
class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(const Dataset& data);

  double point_loss(std::span<const double> x, std::span<const double> p) const override;
  void add_point_gradient(std::span<const double> x, std::span<const double> p, double scale,
                          std::span<double> acc) const override;
  double global_loss(std::span<const double> x) const override;
  double global_grad_norm_sq(std::span<const double> x) const override;

  std::span<const double> global_mean() const { return mean_; }
  double optimal_value() const { return f_star_; }  // attained at x = global mean

 private:
  ModelVector mean_;
  double f_star_ = 0.0;
};

// Binary logistic loss with labels fixed by the sign of the point's
// coordinate sum: f(x, xi) = log(1 + exp(-y(xi) <xi, x>)). Smooth, nonlinear,
// no closed-form constants.
class LogisticObjective final : public Objective {
 public:
  explicit LogisticObjective(const Dataset& data) : Objective(data) {}

  double point_loss(std::span<const double> x, std::span<const double> p) const override;
  void add_point_gradient(std::span<const double> x, std::span<const double> p, double scale,
                          std::span<double> acc) const override;
};

std::unique_ptr<Objective> make_objective(const std::string& kind, const Dataset& data);

struct AssumptionConstants {
  double lipschitz = 0.0;  // L
  double sigma2 = 0.0;     // max over shards of the per-sample gradient variance
  double zeta2 = 0.0;      // weighted spread of shard gradients around the global one
  double f_star = 0.0;     // optimal objective value
};

enum class ZetaWeighting {
  kDataFraction,   // weights p_i = |D_i| / |D|
  kBatchFraction,  // weights M_i / sum M (coincide when batches track shard sizes)
};

// Exact constants for the quadratic objective; anything else throws
// "constants unavailable".
AssumptionConstants compute_assumption_constants(const Objective& objective,
                                                 const Partition& partition,
                                                 ZetaWeighting weighting = ZetaWeighting::kDataFraction);

// Mean gradient over explicitly chosen dataset rows; every row must belong to
// the worker's shard.
ModelVector stochastic_gradient(const Objective& objective, const Partition& partition, int worker,
                                std::span<const double> x, std::span<const std::size_t> sample_rows);

// Mean gradient over the worker's entire shard.
ModelVector full_local_gradient(const Objective& objective, const Partition& partition, int worker,
                                std::span<const double> x);

// p_i-weighted sum of the full local gradients: the exact global gradient.
ModelVector global_gradient(const Objective& objective, const Partition& partition,
                            std::span<const double> x);

}  // namespace cocod
