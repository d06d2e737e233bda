#pragma once

// Dense order-m, dimension-n tensors and the contraction primitives used by
// every solver. Indices are 0-based here; file formats are 1-based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mteq/error.hpp"
#include "mteq/linalg.hpp"

namespace mteq {

namespace detail {

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace detail

class DenseTensor {
 public:
  DenseTensor(std::size_t order, std::size_t dim) : order_(order), dim_(dim) {
    validate_shape();
    values_.assign(detail::ipow(dim_, order_), 0.0);
  }

  DenseTensor(std::size_t order, std::size_t dim, std::vector<double> values)
      : order_(order), dim_(dim), values_(std::move(values)) {
    validate_shape();
    if (values_.size() != detail::ipow(dim_, order_))
      throw Error(ErrorCode::DimensionMismatch, "tensor needs exactly n^m entries");
    for (double v : values_)
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "tensor entry");
  }

  std::size_t order() const noexcept { return order_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  std::size_t linear_index(std::span<const std::size_t> idx) const {
    if (idx.size() != order_) throw Error(ErrorCode::DimensionMismatch, "multi-index length");
    std::size_t lin = 0;
    for (std::size_t k : idx) {
      if (k >= dim_) throw Error(ErrorCode::InvalidArgument, "index out of range");
      lin = lin * dim_ + k;
    }
    return lin;
  }

  void unravel(std::size_t lin, std::span<std::size_t> idx) const {
    for (std::size_t k = order_; k-- > 0;) {
      idx[k] = lin % dim_;
      lin /= dim_;
    }
  }

  double operator()(std::initializer_list<std::size_t> idx) const {
    return values_[linear_index({idx.begin(), idx.size()})];
  }
  double& operator()(std::initializer_list<std::size_t> idx) {
    return values_[linear_index({idx.begin(), idx.size()})];
  }
  double at(std::span<const std::size_t> idx) const { return values_[linear_index(idx)]; }
  double& at(std::span<const std::size_t> idx) { return values_[linear_index(idx)]; }

  double flat(std::size_t lin) const { return values_[lin]; }
  double& flat(std::size_t lin) { return values_[lin]; }

  /// Linear index of (i, j, j, ..., j).
  std::size_t major_index(std::size_t i, std::size_t j) const {
    std::size_t lin = i;
    for (std::size_t k = 1; k < order_; ++k) lin = lin * dim_ + j;
    return lin;
  }

  std::size_t diagonal_index(std::size_t i) const { return major_index(i, i); }

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  void validate_shape() const {
    if (order_ < 2) throw Error(ErrorCode::InvalidArgument, "tensor order must be >= 2");
    if (dim_ < 1) throw Error(ErrorCode::InvalidArgument, "tensor dimension must be >= 1");
  }

  std::size_t order_;
  std::size_t dim_;
  std::vector<double> values_;
};

namespace detail {

// Contracts the trailing (order - keep) indices of t against x, returning the
// n^keep remaining values in lexicographic order.
inline Vector contract_trailing(const DenseTensor& t, std::span<const double> x, std::size_t keep) {
  const std::size_t n = t.dim();
  require_same_length(x.size(), n, "contraction vector length");
  const double* src = t.values().data();
  std::size_t len = t.size();
  Vector buf;
  for (std::size_t level = t.order(); level > keep; --level) {
    const std::size_t outer = len / n;
    Vector next(outer);
    for (std::size_t a = 0; a < outer; ++a) {
      const double* block = src + a * n;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += block[j] * x[j];
      next[a] = s;
    }
    buf = std::move(next);
    src = buf.data();
    len = outer;
  }
  if (buf.empty()) buf.assign(src, src + len);
  return buf;
}

}  // namespace detail

/// (T x^{m-1})_i = sum over trailing indices of T(i, i2..im) x_{i2}...x_{im}.
inline Vector contract_full(const DenseTensor& t, std::span<const double> x) {
  return detail::contract_trailing(t, x, 1);
}

/// The matrix T x^{m-2}: entry (i, j) contracts indices 3..m against x.
inline Matrix contract_matrix(const DenseTensor& t, std::span<const double> x) {
  const std::size_t n = t.dim();
  return Matrix(n, n, detail::contract_trailing(t, x, 2));
}

/// F(x) = T x^{m-1} - b.
inline Vector residual(const DenseTensor& t, std::span<const double> b, std::span<const double> x) {
  detail::require_same_length(b.size(), t.dim(), "rhs length");
  Vector f = contract_full(t, x);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] -= b[i];
  return f;
}

inline Vector elementwise_power(std::span<const double> x, double p) {
  const bool integral = std::floor(p) == p;
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!integral && x[i] < 0.0)
      throw Error(ErrorCode::NegativePowerRHS, "negative entry under fractional power");
    y[i] = std::pow(x[i], p);
  }
  return y;
}

inline constexpr double kRootClampTolerance = 1e-14;

/// Recovers x from x^{[m-1]}. Entries in [-1e-14, 0) are clamped to zero.
inline Vector elementwise_root(std::span<const double> v, std::size_t order) {
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "order must be >= 2");
  Vector x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double vi = v[i];
    if (vi < 0.0) {
      if (vi < -kRootClampTolerance)
        throw Error(ErrorCode::NegativePowerRHS,
                    "entry " + std::to_string(i) + " = " + std::to_string(vi));
      vi = 0.0;
    }
    switch (order) {
      case 2: x[i] = vi; break;
      case 3: x[i] = std::sqrt(vi); break;
      case 4: x[i] = std::cbrt(vi); break;
      default: x[i] = std::pow(vi, 1.0 / static_cast<double>(order - 1)); break;
    }
  }
  return x;
}

/// Majorization matrix together with its (optional) cached factorization.
class MajorizationMatrix {
 public:
  explicit MajorizationMatrix(Matrix values) : values_(std::move(values)) {}

  std::size_t dim() const noexcept { return values_.rows(); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }

  bool has_factorization() const noexcept { return lu_ != nullptr; }

  /// Factorizes on first call; the factorization is shared by copies.
  const LuFactorization& factorization() {
    if (!lu_) lu_ = std::make_shared<const LuFactorization>(lu_factor(values_));
    return *lu_;
  }
  const LuFactorization& factorization() const {
    if (!lu_) throw Error(ErrorCode::InvalidArgument, "majorization matrix not factorized");
    return *lu_;
  }

 private:
  Matrix values_;
  std::shared_ptr<const LuFactorization> lu_;
};

inline MajorizationMatrix majorization(const DenseTensor& t) {
  const std::size_t n = t.dim();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = t.flat(t.major_index(i, j));
  return MajorizationMatrix(std::move(m));
}

/// The off-major part: T with every (i, j, ..., j) entry zeroed.
inline DenseTensor split_offmajor(const DenseTensor& t) {
  DenseTensor out = t;
  for (std::size_t i = 0; i < t.dim(); ++i)
    for (std::size_t j = 0; j < t.dim(); ++j) out.flat(t.major_index(i, j)) = 0.0;
  return out;
}

inline bool is_structured(const DenseTensor& t) {
  const DenseTensor off = split_offmajor(t);
  return std::all_of(off.values().begin(), off.values().end(), [](double v) { return v == 0.0; });
}

inline DenseTensor identity_tensor(std::size_t order, std::size_t dim) {
  DenseTensor t(order, dim);
  for (std::size_t i = 0; i < dim; ++i) t.flat(t.diagonal_index(i)) = 1.0;
  return t;
}

/// Averages every entry over the permutations of its trailing m-1 indices.
inline DenseTensor semi_symmetrize(const DenseTensor& t) {
  const std::size_t m = t.order();
  std::vector<std::size_t> idx(m);
  std::vector<std::size_t> canonical(t.size());
  std::unordered_map<std::size_t, std::pair<double, std::size_t>> groups;
  for (std::size_t lin = 0; lin < t.size(); ++lin) {
    t.unravel(lin, idx);
    std::sort(idx.begin() + 1, idx.end());
    const std::size_t key = t.linear_index(idx);
    canonical[lin] = key;
    auto& g = groups[key];
    g.first += t.flat(lin);
    g.second += 1;
  }
  DenseTensor out(m, t.dim());
  for (std::size_t lin = 0; lin < t.size(); ++lin) {
    const auto& g = groups.at(canonical[lin]);
    out.flat(lin) = g.first / static_cast<double>(g.second);
  }
  return out;
}

struct ScaledSystem {
  DenseTensor tensor;
  Vector rhs;
  double scale;
};

/// Divides T and b by the largest absolute value among their entries.
inline ScaledSystem scale_system(const DenseTensor& t, std::span<const double> b) {
  detail::require_same_length(b.size(), t.dim(), "rhs length");
  double w = 0.0;
  for (double v : t.values()) w = std::max(w, std::abs(v));
  for (double v : b) w = std::max(w, std::abs(v));
  if (w == 0.0) throw Error(ErrorCode::ZeroSystem, "tensor and rhs are identically zero");
  std::vector<double> vals(t.values().begin(), t.values().end());
  for (double& v : vals) v /= w;
  Vector rhs(b.begin(), b.end());
  for (double& v : rhs) v /= w;
  return {DenseTensor(t.order(), t.dim(), std::move(vals)), std::move(rhs), w};
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

inline double max_entry(std::span<const double> v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

inline double min_entry(std::span<const double> v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

}  // namespace mteq
