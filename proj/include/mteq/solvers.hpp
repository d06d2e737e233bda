#pragma once

// Monotone iterative solvers for M-tensor equations T x^{m-1} = b.
//
// Every method updates the elementwise power x^{[m-1]} and recovers x by an
// elementwise root:
//
//   S-MEQM        x_{k+1}^{[m-1]} = x_k^{[m-1]} - alpha M^{-1} F(x_k)
//   Jacobi        ... - alpha D^{-1} F(x_k)
//   Gauss-Seidel  ... - alpha (D - L)^{-1} F(x_k)
//   SOR           ... - alpha omega (D - omega L)^{-1} F(x_k)
//   A-Newton      M x_{k+1}^{[m-1]} = M x_k^{[m-1]} - alpha F(x_k) - eps_k
//
// where M = D - L - U is the majorization matrix, and eps_k is the
// correction built from r(x) = T x^{m-1} / (m-1) - M x^{[m-1]}, falling back
// to eps_k = 0 whenever the corrected iterate leaves the feasible set.
// From a start with F(x_0) <= 0 and alpha in (0, 1], iterates increase
// monotonically and stay feasible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mteq/error.hpp"
#include "mteq/linalg.hpp"
#include "mteq/tensor.hpp"

namespace mteq {

enum class Method { SMEQM, Jacobi, GaussSeidel, SOR, ANewton };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::SMEQM: return "smeqm";
    case Method::Jacobi: return "jacobi";
    case Method::GaussSeidel: return "gs";
    case Method::SOR: return "sor";
    case Method::ANewton: return "anewton";
  }
  return "smeqm";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::SMEQM, Method::Jacobi, Method::GaussSeidel, Method::SOR, Method::ANewton})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

enum class SolveStatus { Converged, MaxIterReached, InfeasibleStart, NegativePowerRHS, SingularMatrix };

constexpr std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterReached: return "MaxIterReached";
    case SolveStatus::InfeasibleStart: return "InfeasibleStart";
    case SolveStatus::NegativePowerRHS: return "NegativePowerRHS";
    case SolveStatus::SingularMatrix: return "SingularMatrix";
  }
  return "Converged";
}

inline std::optional<SolveStatus> parse_status(std::string_view s) {
  for (SolveStatus st : {SolveStatus::Converged, SolveStatus::MaxIterReached, SolveStatus::InfeasibleStart,
                         SolveStatus::NegativePowerRHS, SolveStatus::SingularMatrix})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

/// What to do when x^{[m-1]} + step leaves the nonnegative orthant.
enum class NegativeRootPolicy {
  Abort,
  /// For odd m-1, continue with the real (negative) root; even m-1 still aborts.
  RealOddRoot,
};

struct SolveConfig {
  Method method = Method::SMEQM;
  double alpha = 1.0;
  double omega = 1.0;
  double eta = 1e-8;
  std::size_t max_iter = 3000;
  bool scale = true;
  bool audit_monotone = true;
  double audit_tol = 1e-12;
  /// Slack on F <= 0 for the start-feasibility and A-Newton acceptance tests.
  double accept_tol = 1e-12;
  NegativeRootPolicy root_policy = NegativeRootPolicy::Abort;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 2]");
    if (method == Method::SOR && !(omega > 0.0 && omega < 2.0))
      throw Error(ErrorCode::InvalidArgument, "omega must lie in (0, 2)");
    if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  }
};

struct IterationRecord {
  std::size_t k = 0;          // index of the iterate this record describes
  double res2 = 0.0;          // ||F^(x_k)||_2 on the system actually iterated
  double resinf = 0.0;
  double res_max = 0.0;       // max_i F^_i(x_k), signed
  double res2_unscaled = 0.0;
  double mono_violation = 0.0;  // max(0, max_i (x_{k-1} - x_k)_i)
  bool eps_fallback = false;
  double ms = 0.0;
};

struct IterationTrace {
  IterationRecord initial;  // k = 0, not counted as an iteration
  std::vector<IterationRecord> records;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::MaxIterReached;
  Vector x;
  std::size_t iterations = 0;
  IterationTrace trace;
  double scale = 1.0;
  bool start_feasible = false;
  bool monotone_audited = false;
  /// Meaningful only when monotone_audited.
  bool monotone_ok = true;
  bool alpha_experimental = false;
  std::size_t fallbacks = 0;
  double res2_scaled = 0.0;
  double res2_unscaled = 0.0;
  std::string message;
};

// --- single steps -----------------------------------------------------------

namespace detail {

inline Vector power_update(std::span<const double> x, std::span<const double> direction, double step,
                           std::size_t order, NegativeRootPolicy policy = NegativeRootPolicy::Abort) {
  const double p = static_cast<double>(order - 1);
  const bool real_root = policy == NegativeRootPolicy::RealOddRoot && (order - 1) % 2 == 1;
  // Under RealOddRoot iterates may already be negative; odd integer powers keep the sign.
  Vector v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(x[i], p) + step * direction[i];
  if (!real_root) return elementwise_root(v, order);
  Vector mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
  mag = elementwise_root(mag, order);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0) mag[i] = -mag[i];
  return mag;
}

inline Vector negated(std::span<const double> v) {
  Vector out(v.begin(), v.end());
  for (double& x : out) x = -x;
  return out;
}

}  // namespace detail

/// d = -M^{-1} F(x_k); x_{k+1} = (x_k^{[m-1]} + alpha d)^{[1/(m-1)]}.
inline Vector step_smeqm(const LuFactorization& m_lu, const DenseTensor& t, std::span<const double> b,
                         std::span<const double> x, double alpha) {
  const Vector d = lu_solve(m_lu, detail::negated(residual(t, b, x)));
  return detail::power_update(x, d, alpha, t.order());
}

enum class Splitting { Jacobi, GaussSeidel, SOR };

/// Applies omega (D - omega L)^{-1} for M = D - L - U. Jacobi keeps only D;
/// Gauss-Seidel is the omega = 1 case.
class SplittingOperator {
 public:
  SplittingOperator(const Matrix& m, Splitting variant, double omega = 1.0)
      : variant_(variant), omega_(variant == Splitting::SOR ? omega : 1.0), lower_(m.rows(), m.cols()) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m(i, i) == 0.0) throw Error(ErrorCode::ZeroDiagonal, "row " + std::to_string(i));
      lower_(i, i) = m(i, i);
      if (variant_ == Splitting::Jacobi) continue;
      for (std::size_t j = 0; j < i; ++j) lower_(i, j) = omega_ * m(i, j);
    }
  }

  Vector apply(std::span<const double> f) const {
    if (variant_ == Splitting::Jacobi) {
      Vector y(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) y[i] = f[i] / lower_(i, i);
      return y;
    }
    Vector y = lower_tri_solve(lower_, f);
    for (double& v : y) v *= omega_;
    return y;
  }

 private:
  Splitting variant_;
  double omega_;
  Matrix lower_;
};

inline Vector step_splitting(const DenseTensor& t, std::span<const double> b, std::span<const double> x,
                             double alpha, Splitting variant, double omega = 1.0) {
  const SplittingOperator op(majorization(t).values(), variant, omega);
  return detail::power_update(x, op.apply(residual(t, b, x)), -alpha, t.order());
}

/// r(x) = (T x^{m-1} - (m-1) M x^{[m-1]}) / (m-1).
inline Vector r_correction(const DenseTensor& t, const MajorizationMatrix& m, std::span<const double> x) {
  const double p = static_cast<double>(t.order() - 1);
  Vector r = contract_full(t, x);
  const Vector mx = multiply(m.values(), elementwise_power(x, p));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = r[i] / p - mx[i];
  return r;
}

struct EpsilonState {
  Vector r_prev;  // r at the current iterate
  Vector eps;     // correction for the next step
  bool fallback_used = false;
};

inline EpsilonState epsilon_init(std::span<const double> r0) {
  return {Vector(r0.begin(), r0.end()), Vector(r0.size(), 0.0), false};
}

/// eps_k = min(-alpha F_k, r_k - r_{k-1}) entrywise; r_{k-1} is replaced by r_k.
inline EpsilonState epsilon_update(const EpsilonState& state, std::span<const double> f_k,
                                   std::span<const double> r_k, double alpha) {
  EpsilonState next{Vector(r_k.begin(), r_k.end()), Vector(r_k.size()), state.fallback_used};
  for (std::size_t i = 0; i < r_k.size(); ++i)
    next.eps[i] = std::min(-alpha * f_k[i], r_k[i] - state.r_prev[i]);
  return next;
}

struct ANewtonStep {
  Vector x;
  Vector f;  // F(x_{k+1})
  EpsilonState state;
};

namespace detail {

inline ANewtonStep anewton_step(const MajorizationMatrix& m, const DenseTensor& t, std::span<const double> b,
                                std::span<const double> x, std::span<const double> f, double alpha,
                                const EpsilonState& state, double accept_tol) {
  const std::size_t order = t.order();
  const double p = static_cast<double>(order - 1);
  const LuFactorization& lu = m.factorization();
  const Vector xpow = elementwise_power(x, p);

  // M v = M x^{[m-1]} - alpha F - eps  <=>  v = x^{[m-1]} - M^{-1}(alpha F + eps)
  auto candidate = [&](bool with_eps) {
    Vector rhs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = alpha * f[i] + (with_eps ? state.eps[i] : 0.0);
    const Vector w = lu_solve(lu, rhs);
    Vector v = xpow;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= w[i];
    return elementwise_root(v, order);
  };

  ANewtonStep out;
  out.x = candidate(true);
  Vector tx = contract_full(t, out.x);
  bool fallback = false;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    if (tx[i] - b[i] > accept_tol) {
      fallback = true;
      break;
    }
  }
  if (fallback) {
    out.x = candidate(false);
    tx = contract_full(t, out.x);
  }
  out.f = tx;
  for (std::size_t i = 0; i < tx.size(); ++i) out.f[i] -= b[i];

  const Vector mx = multiply(m.values(), elementwise_power(out.x, p));
  Vector r(tx.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = tx[i] / p - mx[i];
  out.state = epsilon_update(state, out.f, r, alpha);
  out.state.fallback_used = fallback;
  return out;
}

}  // namespace detail

/// One A-Newton step from x_k using state.eps as eps_k. The returned state
/// carries eps_{k+1} and r(x_{k+1}), and whether the eps = 0 re-solve ran.
inline std::pair<Vector, EpsilonState> step_anewton(MajorizationMatrix& m, const DenseTensor& t,
                                                    std::span<const double> b, std::span<const double> x,
                                                    double alpha, const EpsilonState& state,
                                                    double accept_tol = 1e-12) {
  m.factorization();
  const Vector f = residual(t, b, x);
  ANewtonStep s = detail::anewton_step(m, t, b, x, f, alpha, state, accept_tol);
  return {std::move(s.x), std::move(s.state)};
}

// --- driver -------------------------------------------------------------------

inline SolveOutcome solve(const DenseTensor& t_in, std::span<const double> b_in, std::span<const double> x0,
                          const SolveConfig& cfg) {
  cfg.validate();
  detail::require_same_length(b_in.size(), t_in.dim(), "rhs length");
  detail::require_same_length(x0.size(), t_in.dim(), "x0 length");

  SolveOutcome out;
  out.x.assign(x0.begin(), x0.end());
  out.alpha_experimental = cfg.alpha > 1.0;
  if (std::any_of(x0.begin(), x0.end(), [](double v) { return v < 0.0; })) {
    out.status = SolveStatus::InfeasibleStart;
    out.monotone_ok = false;
    out.message = "x0 has negative entries";
    return out;
  }

  std::optional<ScaledSystem> scaled;
  if (cfg.scale) {
    scaled = scale_system(t_in, b_in);
    out.scale = scaled->scale;
  }
  const DenseTensor& t = scaled ? scaled->tensor : t_in;
  const std::span<const double> b = scaled ? std::span<const double>(scaled->rhs) : b_in;
  const std::size_t order = t.order();

  MajorizationMatrix m = majorization(t);
  std::optional<SplittingOperator> splitting;
  try {
    switch (cfg.method) {
      case Method::SMEQM:
      case Method::ANewton: m.factorization(); break;
      case Method::Jacobi: splitting.emplace(m.values(), Splitting::Jacobi); break;
      case Method::GaussSeidel: splitting.emplace(m.values(), Splitting::GaussSeidel); break;
      case Method::SOR: splitting.emplace(m.values(), Splitting::SOR, cfg.omega); break;
    }
  } catch (const Error& e) {
    out.status = SolveStatus::SingularMatrix;
    out.message = e.what();
    return out;
  }

  Vector x = out.x;
  Vector f = residual(t, b, x);
  auto fill_residual = [&](IterationRecord& rec, std::span<const double> fv) {
    rec.res2 = norm2(fv);
    rec.resinf = norm_inf(fv);
    rec.res_max = max_entry(fv);
    rec.res2_unscaled = rec.res2 * out.scale;
  };
  fill_residual(out.trace.initial, f);
  out.start_feasible = out.trace.initial.res_max <= cfg.accept_tol;
  const bool audit = cfg.audit_monotone && out.start_feasible;
  if (!out.start_feasible) out.message = "x0 is not in the feasible set; monotonicity audit disabled";

  EpsilonState eps_state;
  if (cfg.method == Method::ANewton) eps_state = epsilon_init(r_correction(t, m, x));

  using clock = std::chrono::steady_clock;
  std::size_t k = 0;
  for (;;) {
    if (norm2(f) <= cfg.eta) {
      out.status = SolveStatus::Converged;
      break;
    }
    if (k >= cfg.max_iter) {
      out.status = SolveStatus::MaxIterReached;
      break;
    }
    const auto start = clock::now();
    IterationRecord rec;
    rec.k = k + 1;
    Vector x_next;
    Vector f_next;
    try {
      switch (cfg.method) {
        case Method::SMEQM: {
          const Vector d = lu_solve(m.factorization(), detail::negated(f));
          x_next = detail::power_update(x, d, cfg.alpha, order, cfg.root_policy);
          f_next = residual(t, b, x_next);
          break;
        }
        case Method::Jacobi:
        case Method::GaussSeidel:
        case Method::SOR: {
          x_next = detail::power_update(x, splitting->apply(f), -cfg.alpha, order, cfg.root_policy);
          f_next = residual(t, b, x_next);
          break;
        }
        case Method::ANewton: {
          ANewtonStep s = detail::anewton_step(m, t, b, x, f, cfg.alpha, eps_state, cfg.accept_tol);
          x_next = std::move(s.x);
          f_next = std::move(s.f);
          eps_state = std::move(s.state);
          rec.eps_fallback = eps_state.fallback_used;
          if (rec.eps_fallback) ++out.fallbacks;
          break;
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NegativePowerRHS) throw;
      out.status = SolveStatus::NegativePowerRHS;
      out.message = e.what();
      break;
    }
    for (std::size_t i = 0; i < x.size(); ++i)
      rec.mono_violation = std::max(rec.mono_violation, x[i] - x_next[i]);
    fill_residual(rec, f_next);
    rec.ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    if (audit) {
      const double scale_x = std::max(1.0, norm_inf(x_next));
      if (rec.mono_violation > cfg.audit_tol * scale_x || rec.res_max > cfg.audit_tol) out.monotone_ok = false;
    }
    out.trace.records.push_back(rec);
    x = std::move(x_next);
    f = std::move(f_next);
    ++k;
  }
  out.iterations = k;
  out.x = std::move(x);
  out.res2_scaled = norm2(f);
  out.res2_unscaled = out.res2_scaled * out.scale;
  out.monotone_audited = audit;
  return out;
}

}  // namespace mteq
