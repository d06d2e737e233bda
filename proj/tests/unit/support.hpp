#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mteq/mteq.hpp"

namespace mteq::testing {

inline DenseTensor random_tensor(std::size_t m, std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                 double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  DenseTensor t(m, n);
  for (std::size_t i = 0; i < t.size(); ++i) t.flat(i) = u(rng);
  return t;
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline Matrix random_matrix(std::size_t n, std::mt19937_64& rng, double diag_boost = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += diag_boost;
  return a;
}

// s I - B with B >= 0 random and s = 1.2 * max row sum.
inline DenseTensor random_strong_mtensor(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  DenseTensor b = random_tensor(m, n, rng, 0.0, 1.0);
  const double s = 1.2 * max_entry(contract_full(b, Vector(n, 1.0)));
  for (std::size_t i = 0; i < b.size(); ++i) b.flat(i) = -b.flat(i);
  for (std::size_t i = 0; i < n; ++i) b.flat(b.diagonal_index(i)) += s;
  return b;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  return max_abs_diff(a, b) / std::max(1.0, norm_inf(b));
}

}  // namespace mteq::testing
