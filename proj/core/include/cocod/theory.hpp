#pragma once

#include <span>

#include "cocod/allreduce.hpp"

namespace cocod {

// Closed forms behind the convergence and speedup analysis, evaluated exactly
// so measured runs can be checked against them.

struct BoundCoefficients {
  double grad_weight = 1.0;   // multiplies the averaged gradient norms on the LHS
  double noise_weight = 0.0;  // multiplies the variance terms on the RHS
};

// grad_weight = 1 - 2k * noise_weight, noise_weight = 8 g^2 L^2 k / (1 - 16 g^2 k^2 L^2).
// Throws "step size too large for period" when the denominator is not positive.
BoundCoefficients bound_coefficients(double gamma, double lipschitz, int k);

struct BoundParams {
  double gamma = 0.0;
  double lipschitz = 1.0;
  int k = 1;
  double sigma2 = 0.0;
  double zeta2 = 0.0;
  int n_workers = 1;
  double sum_batch = 1.0;   // sum_i M_i
  long long total_steps = 1;
  double initial_gap = 0.0;  // f(x_hat_0) - f*
};

// Upper bound on (1/T) sum_t grad_weight * E||grad f(x_hat_t)||^2:
// 2 gap/(T gamma) + noise_weight (N sigma^2 / sum M + 2 k zeta^2) + gamma L sigma^2 / sum M.
double gradient_norm_bound(const BoundParams& params);

// Variance-matched step size gamma = (1/sigma) sqrt(sum M / T); sigma = 0 is
// rejected ("use deterministic step rule").
double variance_scaled_lr(double sigma, long long total_steps, double sum_batch);

// Smallest iteration count under which the variance-matched rate holds:
// max of the three threshold terms, rounded up.
long long min_iterations(double lipschitz, double sigma, double zeta, int k, int n_workers,
                         std::span<const int> batch_sizes);

// Rate at the variance-matched step size: 4 sigma (gap + L) / sqrt(T sum M).
double averaged_rate_bound(double sigma, double gap, double lipschitz, long long total_steps,
                           double sum_batch);

// Largest communication period keeping the rate: max(1, floor(c T^{1/4} / N^{3/4})).
long long max_period(long long total_steps, int n_workers, double scale_constant = 1.0);

// gamma_N = (sum_i C_i / C_ref) * gamma_1, reference worker first.
double scaled_lr(double gamma_1, std::span<const double> capabilities);

// Mean wall time of one logical step under the overlap cost model.
double analytic_iteration_time(VariantKind kind, double t_comp, double t_comm, double overlap,
                               int k);

// N * t_comp / analytic_iteration_time(...).
double predicted_speedup(VariantKind kind, int n_workers, double t_comp, double t_comm,
                         double overlap, int k);

// Upper bound on the run-summed, batch-weighted model divergence
// sum_t sum_i (M_i/sum M) E||x_hat_t - x_t^i||^2, given the measured
// sum_t E||grad f(x_hat_t)||^2.
double divergence_sum_bound(double gamma, double lipschitz, int k, double sigma2, double zeta2,
                            int n_workers, double sum_batch, long long total_steps,
                            double grad_norm_sum);

}  // namespace cocod
