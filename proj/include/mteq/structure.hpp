#pragma once

// Z/M-tensor certification, feasibility of a point, the sufficient existence
// test, and the closed-form solve for tensors whose only nonzeros sit at
// (i, j, ..., j).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "mteq/error.hpp"
#include "mteq/linalg.hpp"
#include "mteq/tensor.hpp"

namespace mteq {

inline bool is_z_tensor(const DenseTensor& t) {
  std::vector<std::size_t> idx(t.order());
  for (std::size_t lin = 0; lin < t.size(); ++lin) {
    if (t.flat(lin) <= 0.0) continue;
    t.unravel(lin, idx);
    if (!std::all_of(idx.begin(), idx.end(), [&](std::size_t k) { return k == idx[0]; })) return false;
  }
  return true;
}

enum class MVerdict { StrongByRowSum, NotZTensor, Unknown };

constexpr std::string_view to_string(MVerdict v) {
  switch (v) {
    case MVerdict::StrongByRowSum: return "StrongByRowSum";
    case MVerdict::NotZTensor: return "NotZTensor";
    case MVerdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

/// Decomposition T = s I - B with s the largest diagonal entry.
///
/// `row_sum_bound` is max_i (B e^{m-1})_i. When it does not certify, a
/// weighted bound max_i (B w^{m-1})_i / w_i^{m-1} over a positive w found by
/// the power iteration is tried (only if requested); either bound below s
/// proves T is a strong M-tensor.
struct MTensorCertificate {
  double s = 0.0;
  double row_sum_bound = 0.0;
  std::optional<double> power_estimate;
  std::optional<double> weighted_bound;
  MVerdict verdict = MVerdict::Unknown;

  double margin() const {
    return s - std::min(row_sum_bound, weighted_bound.value_or(row_sum_bound));
  }
};

/// B = s I - T for the given shift.
inline DenseTensor shifted_complement(const DenseTensor& t, double s) {
  DenseTensor b(t.order(), t.dim());
  for (std::size_t lin = 0; lin < t.size(); ++lin) b.flat(lin) = -t.flat(lin);
  for (std::size_t i = 0; i < t.dim(); ++i) b.flat(t.diagonal_index(i)) += s;
  return b;
}

struct PowerIterationResult {
  double estimate = 0.0;
  /// Smallest Collatz-Wielandt ratio seen at a strictly positive iterate.
  double best_positive_bound = std::numeric_limits<double>::infinity();
  Vector best_weights;
  std::size_t iterations = 0;
};

/// Power-type iteration u <- (B u^{m-1})^{[1/(m-1)]}, normalized in the
/// infinity norm, starting from e. Stops once u settles to `tol`, after
/// `max_iter` sweeps, or once a positive iterate has ratio below
/// `stop_below` (when given).
inline PowerIterationResult power_iteration(const DenseTensor& b, std::size_t max_iter, double tol,
                                            std::optional<double> stop_below = std::nullopt) {
  for (double v : b.values())
    if (v < 0.0) throw Error(ErrorCode::NegativeEntry, "power iteration needs a nonnegative tensor");
  const std::size_t n = b.dim();
  const double p = static_cast<double>(b.order() - 1);
  PowerIterationResult res;
  Vector u(n, 1.0);
  for (std::size_t it = 0; it < std::max<std::size_t>(max_iter, 1); ++it) {
    res.iterations = it + 1;
    const Vector y = contract_full(b, u);
    if (max_entry(y) <= 0.0) {
      res.estimate = 0.0;
      return res;
    }
    double ratio = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (u[i] > tol)
        ratio = std::max(ratio, y[i] / std::pow(u[i], p));
      else
        positive = false;
    }
    res.estimate = ratio;
    if (positive && ratio < res.best_positive_bound) {
      res.best_positive_bound = ratio;
      res.best_weights = u;
    }
    if (stop_below && res.best_positive_bound < *stop_below) return res;
    Vector next = elementwise_root(y, b.order());
    const double top = max_entry(next);
    for (double& v : next) v /= top;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - u[i]));
    u = std::move(next);
    if (change <= tol) break;
  }
  return res;
}

inline double spectral_radius_estimate(const DenseTensor& b, std::size_t max_iter, double tol) {
  return power_iteration(b, max_iter, tol).estimate;
}

struct CertificateOptions {
  bool use_power_method = false;
  std::size_t max_iter = 5000;
  double tol = 1e-12;
};

/// A bound certifies only if it clears s by this much relative to max(1, |s|),
/// so that rounding in the row sums never produces a verdict.
inline constexpr double kCertificateSlack = 1e-12;

inline MTensorCertificate mtensor_certificate(const DenseTensor& t, CertificateOptions opts = {}) {
  MTensorCertificate cert;
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.dim(); ++i) s = std::max(s, t.flat(t.diagonal_index(i)));
  cert.s = s;
  const DenseTensor b = shifted_complement(t, s);
  const Vector e(t.dim(), 1.0);
  cert.row_sum_bound = max_entry(contract_full(b, e));
  if (!is_z_tensor(t)) {
    cert.verdict = MVerdict::NotZTensor;
    return cert;
  }
  const double slack = kCertificateSlack * std::max(1.0, std::abs(s));
  if (s - cert.row_sum_bound > slack) cert.verdict = MVerdict::StrongByRowSum;
  if (opts.use_power_method) {
    std::optional<double> stop;
    if (cert.verdict != MVerdict::StrongByRowSum) stop = s - slack;
    const PowerIterationResult pr = power_iteration(b, opts.max_iter, opts.tol, stop);
    cert.power_estimate = pr.estimate;
    if (!pr.best_weights.empty()) {
      cert.weighted_bound = pr.best_positive_bound;
      if (s - pr.best_positive_bound > slack) cert.verdict = MVerdict::StrongByRowSum;
    }
  }
  return cert;
}

inline MTensorCertificate mtensor_certificate(const DenseTensor& t, bool use_power_method) {
  return mtensor_certificate(t, CertificateOptions{use_power_method});
}

inline constexpr double kDefaultFeasibilityTol = 1e-10;

struct FeasibilityReport {
  bool is_nonneg = false;
  double residual_max = 0.0;
  bool in_S = false;
};

/// Membership of x in {x >= 0 : T x^{m-1} <= b}, relaxed by `tol`.
inline FeasibilityReport is_feasible_S(const DenseTensor& t, std::span<const double> b,
                                       std::span<const double> x, double tol = kDefaultFeasibilityTol) {
  FeasibilityReport r;
  r.is_nonneg = std::all_of(x.begin(), x.end(), [tol](double v) { return v >= -tol; });
  r.residual_max = max_entry(residual(t, b, x));
  r.in_S = r.is_nonneg && r.residual_max <= tol;
  return r;
}

inline constexpr double kNonnegativeSlack = 1e-12;

/// Closed-form solve of M x^{[m-1]} = b for tensors with no off-major entries.
inline Vector solve_structured(const DenseTensor& t, std::span<const double> b) {
  if (!is_structured(t))
    throw Error(ErrorCode::NotStructured, "tensor has entries outside the (i, j, ..., j) positions");
  detail::require_same_length(b.size(), t.dim(), "rhs length");
  const Vector y = lu_solve(lu_factor(majorization(t).values()), b);
  Vector clamped(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < -kNonnegativeSlack)
      throw Error(ErrorCode::NoNonnegativeSolution, "M^{-1} b has a negative entry");
    clamped[i] = std::max(0.0, y[i]);
  }
  return elementwise_root(clamped, t.order());
}

enum class Existence { PositiveExists, NonnegativeExists, Inconclusive };

constexpr std::string_view to_string(Existence e) {
  switch (e) {
    case Existence::PositiveExists: return "PositiveExists";
    case Existence::NonnegativeExists: return "NonnegativeExists";
    case Existence::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

/// Sufficient test: M^{-1} b >= 0 gives a nonnegative solution, > 0 a
/// positive one. Inconclusive does not rule either out.
inline Existence existence_sufficient(const DenseTensor& t, std::span<const double> b) {
  const Vector y = lu_solve(lu_factor(majorization(t).values()), b);
  if (std::all_of(y.begin(), y.end(), [](double v) { return v > kNonnegativeSlack; }))
    return Existence::PositiveExists;
  if (std::all_of(y.begin(), y.end(), [](double v) { return v >= -kNonnegativeSlack; }))
    return Existence::NonnegativeExists;
  return Existence::Inconclusive;
}

}  // namespace mteq
