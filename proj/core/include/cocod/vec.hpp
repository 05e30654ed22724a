#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cocod {

// Dense parameter vector. Plain storage; the helpers below keep accumulation
// order fixed (ascending index, left fold) so repeated runs are bit-identical.
using ModelVector = std::vector<double>;

namespace vec {

inline void check_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
}

// y += s * x
inline void add_scaled(std::span<double> y, double s, std::span<const double> x) {
  check_same_dim(y, x);
  for (std::size_t c = 0; c < y.size(); ++c) y[c] += s * x[c];
}

// out = a - b
inline void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  check_same_dim(a, b);
  for (std::size_t c = 0; c < a.size(); ++c) out[c] = a[c] - b[c];
}

inline double norm_sq(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double dist_sq(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace vec
}  // namespace cocod
