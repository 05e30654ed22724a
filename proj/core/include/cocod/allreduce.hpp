#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cocod/vec.hpp"

namespace cocod {

enum class VariantKind { kSSGD, kLocalSGD, kPipeSGD, kCoCoD };

struct RingTopology {
  int n = 1;
  int successor(int i) const { return (i + 1) % n; }
  int predecessor(int i) const { return (i + n - 1) % n; }
};

struct CommStats {
  long long rounds = 0;         // collective invocations
  long long steps = 0;          // ring steps, 2(N-1) per round
  long long elements_sent = 0;  // vector elements on the wire, all workers
  long long handshakes = 0;     // per-worker sync events, summed over workers
  bool non_ring = false;        // a gather-broadcast fallback happened (d < N)

  CommStats& operator+=(const CommStats& o) {
    rounds += o.rounds;
    steps += o.steps;
    elements_sent += o.elements_sent;
    handshakes += o.handshakes;
    non_ring = non_ring || o.non_ring;
    return *this;
  }
};

// Message-level simulated ring allreduce of sum_i w_i x_i: inputs are
// pre-scaled by their weights, then reduce-scatter (N-1 steps) and allgather
// (N-1 steps) run on ceil(d/N)-sized chunks with the last chunk zero-padded.
// Every worker ends holding the identical result. Weights must sum to 1
// within 1e-12. When d < N the collective falls back to a gather-broadcast
// with the same result and stats flagged non_ring.
std::vector<ModelVector> ring_allreduce_weighted(std::span<const ModelVector> vectors,
                                                 std::span<const double> weights,
                                                 CommStats* stats = nullptr);

// Ring cost: 2(N-1) * (alpha + ceil(d/N) * beta) seconds; 0 for one worker.
double comm_duration(int n_workers, std::size_t dim, double alpha, double beta);

// Collective rounds needed for T logical steps: T for the per-step variants,
// ceil(T/k) for the periodic ones (a final partial period still merges).
long long comm_complexity(VariantKind kind, long long total_steps, int k);

}  // namespace cocod
