#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cocod {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, step, slot), so identical cursors yield identical samples
// regardless of execution order or which component asks first. This is the
// whole reproducibility story: no generator state is ever carried around.

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                                     std::uint64_t slot) noexcept {
  std::uint64_t h = mix64(seed ^ 0x8824a3d16fca4e71ULL);
  h = mix64(h ^ stream);
  h = mix64(h ^ step);
  h = mix64(h ^ slot);
  return h;
}

// in [0, 1)
inline double unit_real(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                        std::uint64_t slot) noexcept {
  return static_cast<double>(counter_draw(seed, stream, step, slot) >> 11) * 0x1.0p-53;
}

// in (0, 1]; safe under log()
inline double unit_real_pos(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                            std::uint64_t slot) noexcept {
  return static_cast<double>((counter_draw(seed, stream, step, slot) >> 11) + 1) * 0x1.0p-53;
}

// uniform index in [0, bound); Lemire reduction, no rejection loop
inline std::size_t bounded_index(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                                 std::uint64_t slot, std::size_t bound) noexcept {
  const std::uint64_t h = counter_draw(seed, stream, step, slot);
  return static_cast<std::size_t>((static_cast<unsigned __int128>(h) * bound) >> 64);
}

// standard normal via Box-Muller; consumes slots (2*pair_slot, 2*pair_slot+1)
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                     std::uint64_t pair_slot) noexcept {
  const double u1 = unit_real_pos(seed, stream, step, 2 * pair_slot);
  const double u2 = unit_real(seed, stream, step, 2 * pair_slot + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

enum class StreamKind : std::uint64_t {
  kDataPoints = 1,  // dataset generation, per shard
  kShardMeans = 2,  // per-shard mean offsets
  kSamples = 3,     // mini-batch index draws, per worker
  kJitter = 4,      // compute-time jitter, per worker (timing only)
};

constexpr std::uint64_t stream_id(StreamKind kind, std::uint64_t worker) noexcept {
  return (static_cast<std::uint64_t>(kind) << 32) | worker;
}

// Sub-seed derivation: dataset generation and mini-batch sampling get
// decorrelated seeds from the single top-level one.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) noexcept {
  return mix64(root ^ mix64(tag));
}

inline constexpr std::uint64_t kDatasetSeedTag = 0x6474u;   // 'dt'
inline constexpr std::uint64_t kSamplingSeedTag = 0x7370u;  // 'sp'
inline constexpr std::uint64_t kTimingSeedTag = 0x746du;    // 'tm'

}  // namespace cocod
