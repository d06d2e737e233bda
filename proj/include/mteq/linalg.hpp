#pragma once

// Small dense linear-algebra kernel: a row-major matrix, LU with partial
// pivoting, and forward substitution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mteq/error.hpp"

namespace mteq {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_)
      throw Error(ErrorCode::DimensionMismatch, "matrix value count does not match shape");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Vector multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix-matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// Infinity norm (max absolute row sum).
inline double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

/// P·A = L·U with L unit lower triangular. Both factors share `packed`:
/// strictly-lower entries hold L, the rest holds U. Row k of P·A is row
/// `perm[k]` of A.
struct LuFactorization {
  std::size_t dim = 0;
  Matrix packed;
  std::vector<std::size_t> perm;

  Matrix lower() const {
    Matrix l = Matrix::identity(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < i; ++j) l(i, j) = packed(i, j);
    return l;
  }

  Matrix upper() const {
    Matrix u(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) u(i, j) = packed(i, j);
    return u;
  }

  Matrix permuted(const Matrix& a) const {
    Matrix pa(dim, dim);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t j = 0; j < dim; ++j) pa(k, j) = a(perm[k], j);
    return pa;
  }
};

inline constexpr double kSingularPivotRatio = 1e-14;

/// Partial-pivoting LU. A pivot smaller than 1e-14 times the largest entry
/// of its original row is reported as SingularMatrix.
inline LuFactorization lu_factor(const Matrix& a) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "lu_factor needs a square matrix");
  const std::size_t n = a.rows();
  LuFactorization f{n, a, std::vector<std::size_t>(n)};
  std::vector<double> row_scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    f.perm[i] = i;
    for (double v : a.row(i)) row_scale[i] = std::max(row_scale[i], std::abs(v));
  }
  Matrix& lu = f.packed;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(lu(r, k)) > best) {
        best = std::abs(lu(r, k));
        p = r;
      }
    }
    if (best == 0.0 || best < kSingularPivotRatio * row_scale[f.perm[p]])
      throw Error(ErrorCode::SingularMatrix, "pivot " + std::to_string(k) + " below threshold");
    if (p != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(p).begin());
      std::swap(f.perm[k], f.perm[p]);
    }
    const double pivot = lu(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = lu(r, k) / pivot;
      lu(r, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(r, j) -= factor * lu(k, j);
    }
  }
  return f;
}

inline Vector lu_solve(const LuFactorization& f, std::span<const double> rhs) {
  if (rhs.size() != f.dim) throw Error(ErrorCode::DimensionMismatch, "lu_solve rhs length");
  const std::size_t n = f.dim;
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.packed(i, j) * y[j];
    y[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.packed(i, j) * y[j];
    y[i] = s / f.packed(i, i);
  }
  return y;
}

/// Forward substitution. Only the lower triangle (diagonal included) of `a`
/// is read.
inline Vector lower_tri_solve(const Matrix& a, std::span<const double> rhs) {
  if (!a.square() || a.rows() != rhs.size())
    throw Error(ErrorCode::DimensionMismatch, "lower_tri_solve shape");
  const std::size_t n = a.rows();
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a(i, i) == 0.0) throw Error(ErrorCode::ZeroDiagonal, "row " + std::to_string(i));
    double s = rhs[i];
    for (std::size_t j = 0; j < i; ++j) s -= a(i, j) * y[j];
    y[i] = s / a(i, i);
  }
  return y;
}

}  // namespace mteq
