#include "cocod/allreduce.hpp"

#include <cmath>
#include <stdexcept>

namespace cocod {

namespace {

void validate_inputs(std::span<const ModelVector> vectors, std::span<const double> weights) {
  if (vectors.empty()) throw std::invalid_argument("no inputs");
  if (weights.size() != vectors.size()) throw std::invalid_argument("weights length mismatch");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != dim) throw std::invalid_argument("dimension mismatch");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
}

}  // namespace

std::vector<ModelVector> ring_allreduce_weighted(std::span<const ModelVector> vectors,
                                                 std::span<const double> weights,
                                                 CommStats* stats) {
  validate_inputs(vectors, weights);
  const int n = static_cast<int>(vectors.size());
  const std::size_t dim = vectors.front().size();

  if (n == 1) {
    // nothing on the wire; not counted as a round
    std::vector<ModelVector> out(1, vectors[0]);
    for (double& v : out[0]) v *= weights[0];
    return out;
  }

  if (dim < static_cast<std::size_t>(n)) {
    // gather-broadcast fallback: rank 0 reduces in worker order and fans out
    ModelVector sum(dim, 0.0);
    for (int i = 0; i < n; ++i) vec::add_scaled(sum, weights[i], vectors[i]);
    if (stats) {
      stats->rounds += 1;
      stats->steps += 2;
      stats->elements_sent += 2LL * (n - 1) * static_cast<long long>(dim);
      stats->handshakes += 2LL * (n - 1);
      stats->non_ring = true;
    }
    return std::vector<ModelVector>(n, sum);
  }

  const std::size_t chunk = (dim + n - 1) / n;  // ceil(d/N), last chunk zero-padded
  const std::size_t padded = chunk * n;
  const RingTopology ring{n};

  // pre-scale so the collective is a plain sum
  std::vector<ModelVector> buf(n, ModelVector(padded, 0.0));
  for (int i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) buf[i][c] = weights[i] * vectors[i][c];

  // reduce-scatter: at step s worker i sends chunk (i - s) mod n to its
  // successor, which accumulates incoming + local
  for (int s = 0; s < n - 1; ++s) {
    std::vector<ModelVector> incoming(n);
    for (int i = 0; i < n; ++i) {
      const int send_chunk = ((i - s) % n + n) % n;
      const int dst = ring.successor(i);
      incoming[dst].assign(buf[i].begin() + send_chunk * chunk,
                           buf[i].begin() + (send_chunk + 1) * chunk);
    }
    for (int i = 0; i < n; ++i) {
      const int recv_chunk = ((i - 1 - s) % n + n) % n;
      for (std::size_t c = 0; c < chunk; ++c)
        buf[i][recv_chunk * chunk + c] = incoming[i][c] + buf[i][recv_chunk * chunk + c];
    }
  }

  // allgather: worker i owns fully reduced chunk (i + 1) mod n; circulate copies
  for (int s = 0; s < n - 1; ++s) {
    std::vector<ModelVector> incoming(n);
    for (int i = 0; i < n; ++i) {
      const int send_chunk = ((i + 1 - s) % n + n) % n;
      const int dst = ring.successor(i);
      incoming[dst].assign(buf[i].begin() + send_chunk * chunk,
                           buf[i].begin() + (send_chunk + 1) * chunk);
    }
    for (int i = 0; i < n; ++i) {
      const int recv_chunk = ((i - s) % n + n) % n;
      for (std::size_t c = 0; c < chunk; ++c) buf[i][recv_chunk * chunk + c] = incoming[i][c];
    }
  }

  if (stats) {
    stats->rounds += 1;
    stats->steps += 2LL * (n - 1);
    stats->elements_sent += static_cast<long long>(n) * 2 * (n - 1) * static_cast<long long>(chunk);
    stats->handshakes += static_cast<long long>(n) * 2 * (n - 1);
  }

  std::vector<ModelVector> out(n, ModelVector(dim));
  for (int i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) out[i][c] = buf[i][c];
  return out;
}

double comm_duration(int n_workers, std::size_t dim, double alpha, double beta) {
  if (n_workers <= 1) return 0.0;
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("alpha/beta must be >= 0");
  const double chunk = std::ceil(static_cast<double>(dim) / n_workers);
  return 2.0 * (n_workers - 1) * (alpha + chunk * beta);
}

long long comm_complexity(VariantKind kind, long long total_steps, int k) {
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  switch (kind) {
    case VariantKind::kSSGD:
    case VariantKind::kPipeSGD:
      return total_steps;
    case VariantKind::kLocalSGD:
    case VariantKind::kCoCoD:
      if (k < 1) throw std::invalid_argument("period must be >= 1");
      return (total_steps + k - 1) / k;
  }
  return total_steps;
}

}  // namespace cocod
