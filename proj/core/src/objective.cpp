#include "cocod/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cocod {

double Objective::global_loss(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < data_->size(); ++i) s += point_loss(x, data_->point(i));
  return s / static_cast<double>(data_->size());
}

double Objective::global_grad_norm_sq(std::span<const double> x) const {
  ModelVector g(dim(), 0.0);
  const double inv = 1.0 / static_cast<double>(data_->size());
  for (std::size_t i = 0; i < data_->size(); ++i) add_point_gradient(x, data_->point(i), inv, g);
  return vec::norm_sq(g);
}

QuadraticObjective::QuadraticObjective(const Dataset& data) : Objective(data) {
  mean_.assign(data.dim(), 0.0);
  const double inv = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) vec::add_scaled(mean_, inv, data.point(i));
  for (std::size_t i = 0; i < data.size(); ++i)
    f_star_ += 0.5 * vec::dist_sq(data.point(i), mean_);
  f_star_ *= inv;
}

double QuadraticObjective::point_loss(std::span<const double> x, std::span<const double> p) const {
  return 0.5 * vec::dist_sq(x, p);
}

void QuadraticObjective::add_point_gradient(std::span<const double> x, std::span<const double> p,
                                            double scale, std::span<double> acc) const {
  for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += scale * (x[c] - p[c]);
}

double QuadraticObjective::global_loss(std::span<const double> x) const {
  return 0.5 * vec::dist_sq(x, mean_) + f_star_;
}

double QuadraticObjective::global_grad_norm_sq(std::span<const double> x) const {
  return vec::dist_sq(x, mean_);
}

namespace {
inline double logistic_label(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v;
  return s > 0.0 ? 1.0 : -1.0;
}
}  // namespace

double LogisticObjective::point_loss(std::span<const double> x, std::span<const double> p) const {
  const double margin = logistic_label(p) * vec::dot(p, x);
  // log(1 + exp(-m)) in a form stable for large |m|
  return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

void LogisticObjective::add_point_gradient(std::span<const double> x, std::span<const double> p,
                                           double scale, std::span<double> acc) const {
  const double y = logistic_label(p);
  const double margin = y * vec::dot(p, x);
  const double s = 1.0 / (1.0 + std::exp(margin));  // sigmoid(-margin)
  const double coeff = -scale * y * s;
  for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += coeff * p[c];
}

std::unique_ptr<Objective> make_objective(const std::string& kind, const Dataset& data) {
  if (kind == "quadratic") return std::make_unique<QuadraticObjective>(data);
  if (kind == "logistic") return std::make_unique<LogisticObjective>(data);
  throw std::invalid_argument("unknown objective: " + kind);
}

AssumptionConstants compute_assumption_constants(const Objective& objective,
                                                 const Partition& partition,
                                                 ZetaWeighting weighting) {
  const auto* quad = dynamic_cast<const QuadraticObjective*>(&objective);
  if (quad == nullptr) throw std::invalid_argument("constants unavailable");

  const Dataset& data = objective.data();
  const int n = partition.n_workers();
  std::vector<ModelVector> shard_mean(n, ModelVector(data.dim(), 0.0));
  for (int i = 0; i < n; ++i) {
    const auto& shard = partition.shards[i];
    if (shard.empty()) throw std::invalid_argument("empty shard");
    const double inv = 1.0 / static_cast<double>(shard.size());
    for (std::size_t row : shard) vec::add_scaled(shard_mean[i], inv, data.point(row));
  }

  AssumptionConstants out;
  out.lipschitz = 1.0;  // identity Hessian
  out.f_star = quad->optimal_value();

  // per-sample gradient variance is x-independent: E||xi - mu_i||^2
  for (int i = 0; i < n; ++i) {
    double var = 0.0;
    for (std::size_t row : partition.shards[i]) var += vec::dist_sq(data.point(row), shard_mean[i]);
    var /= static_cast<double>(partition.shards[i].size());
    out.sigma2 = std::max(out.sigma2, var);
  }

  const std::vector<double> w = weighting == ZetaWeighting::kDataFraction
                                    ? partition.weights
                                    : partition.batch_weights();
  for (int i = 0; i < n; ++i) out.zeta2 += w[i] * vec::dist_sq(shard_mean[i], quad->global_mean());
  return out;
}

namespace {
void check_in_shard(const Partition& partition, int worker, std::span<const std::size_t> rows) {
  const auto& shard = partition.shards[worker];
  for (std::size_t r : rows) {
    if (!std::binary_search(shard.begin(), shard.end(), r))
      throw std::invalid_argument("sample index outside worker shard");
  }
}
}  // namespace

ModelVector stochastic_gradient(const Objective& objective, const Partition& partition, int worker,
                                std::span<const double> x, std::span<const std::size_t> sample_rows) {
  if (sample_rows.empty()) throw std::invalid_argument("empty sample");
  check_in_shard(partition, worker, sample_rows);
  ModelVector g(objective.dim(), 0.0);
  const double inv = 1.0 / static_cast<double>(sample_rows.size());
  for (std::size_t row : sample_rows)
    objective.add_point_gradient(x, objective.data().point(row), inv, g);
  return g;
}

ModelVector full_local_gradient(const Objective& objective, const Partition& partition, int worker,
                                std::span<const double> x) {
  const auto& shard = partition.shards[worker];
  ModelVector g(objective.dim(), 0.0);
  const double inv = 1.0 / static_cast<double>(shard.size());
  for (std::size_t row : shard) objective.add_point_gradient(x, objective.data().point(row), inv, g);
  return g;
}

ModelVector global_gradient(const Objective& objective, const Partition& partition,
                            std::span<const double> x) {
  ModelVector g(objective.dim(), 0.0);
  for (int i = 0; i < partition.n_workers(); ++i) {
    const ModelVector local = full_local_gradient(objective, partition, i, x);
    vec::add_scaled(g, partition.weights[i], local);
  }
  return g;
}

}  // namespace cocod
