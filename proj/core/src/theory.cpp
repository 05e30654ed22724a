#include "cocod/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace cocod {

BoundCoefficients bound_coefficients(double gamma, double lipschitz, int k) {
  if (k < 1) throw std::invalid_argument("period must be >= 1");
  const double g2 = gamma * gamma * lipschitz * lipschitz;
  const double denom = 1.0 - 16.0 * g2 * static_cast<double>(k) * k;
  if (denom <= 0.0) throw std::invalid_argument("step size too large for period");
  BoundCoefficients c;
  c.noise_weight = 8.0 * g2 * static_cast<double>(k) / denom;
  c.grad_weight = 1.0 - 2.0 * k * c.noise_weight;
  return c;
}

double gradient_norm_bound(const BoundParams& p) {
  if (p.gamma > 1.0 / p.lipschitz)
    throw std::invalid_argument("step size must satisfy gamma <= 1/L");
  const BoundCoefficients c = bound_coefficients(p.gamma, p.lipschitz, p.k);
  const double variance_mix =
      p.n_workers * p.sigma2 / p.sum_batch + 2.0 * p.k * p.zeta2;
  return 2.0 * p.initial_gap / (static_cast<double>(p.total_steps) * p.gamma) +
         c.noise_weight * variance_mix + p.gamma * p.lipschitz * p.sigma2 / p.sum_batch;
}

double variance_scaled_lr(double sigma, long long total_steps, double sum_batch) {
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("use deterministic step rule");
  return std::sqrt(sum_batch / static_cast<double>(total_steps)) / sigma;
}

long long min_iterations(double lipschitz, double sigma, double zeta, int k, int n_workers,
                         std::span<const int> batch_sizes) {
  if (!(sigma > 0.0)) throw std::invalid_argument("use deterministic step rule");
  double sum_batch = 0.0;
  for (int m : batch_sizes) sum_batch += static_cast<double>(m);
  const double l2 = lipschitz * lipschitz;
  const double s2 = sigma * sigma;
  const double kk = static_cast<double>(k) * k;
  const double term1 = l2 * sum_batch / s2;
  const double term2 = 48.0 * sum_batch * l2 * kk / s2;
  const double variance_mix = n_workers * s2 / sum_batch + 2.0 * k * zeta * zeta;
  const double term3 = 144.0 * sum_batch * sum_batch * sum_batch / (s2 * s2 * s2) * l2 * kk *
                       variance_mix * variance_mix;
  const double t = std::max(term1, std::max(term2, term3));
  return static_cast<long long>(std::ceil(t));
}

double averaged_rate_bound(double sigma, double gap, double lipschitz, long long total_steps,
                           double sum_batch) {
  return 4.0 * sigma * (gap + lipschitz) /
         std::sqrt(static_cast<double>(total_steps) * sum_batch);
}

long long max_period(long long total_steps, int n_workers, double scale_constant) {
  if (total_steps < 1 || n_workers < 1) throw std::invalid_argument("T, N must be >= 1");
  const double k = scale_constant * std::pow(static_cast<double>(total_steps), 0.25) /
                   std::pow(static_cast<double>(n_workers), 0.75);
  return std::max(1LL, static_cast<long long>(std::floor(k)));
}

double scaled_lr(double gamma_1, std::span<const double> capabilities) {
  if (!(gamma_1 > 0.0)) throw std::invalid_argument("gamma_1 must be > 0");
  if (capabilities.empty()) throw std::invalid_argument("no workers");
  double sum = 0.0;
  for (double c : capabilities) {
    if (!(c > 0.0)) throw std::invalid_argument("capabilities must be positive");
    sum += c;
  }
  return gamma_1 * sum / capabilities.front();
}

double analytic_iteration_time(VariantKind kind, double t_comp, double t_comm, double overlap,
                               int k) {
  if (!(t_comp > 0.0)) throw std::invalid_argument("t_comp must be > 0");
  if (k < 1) throw std::invalid_argument("period must be >= 1");
  switch (kind) {
    case VariantKind::kSSGD: return t_comp + t_comm;
    case VariantKind::kPipeSGD: return t_comp + t_comm * overlap;
    case VariantKind::kLocalSGD: return t_comp + t_comm / k;
    case VariantKind::kCoCoD: return t_comp + t_comm * overlap / k;
  }
  return t_comp;
}

double predicted_speedup(VariantKind kind, int n_workers, double t_comp, double t_comm,
                         double overlap, int k) {
  return n_workers * t_comp / analytic_iteration_time(kind, t_comp, t_comm, overlap, k);
}

double divergence_sum_bound(double gamma, double lipschitz, int k, double sigma2, double zeta2,
                            int n_workers, double sum_batch, long long total_steps,
                            double grad_norm_sum) {
  if (k < 1) throw std::invalid_argument("period must be >= 1");
  const double g2 = gamma * gamma;
  const double denom = 1.0 - 16.0 * g2 * static_cast<double>(k) * k * lipschitz * lipschitz;
  if (denom <= 0.0) throw std::invalid_argument("step size too large for period");
  const double t = static_cast<double>(total_steps);
  return 8.0 * g2 * k / denom *
         (t * n_workers * sigma2 / sum_batch + 2.0 * k * t * zeta2 + 2.0 * k * grad_norm_sum);
}

}  // namespace cocod
