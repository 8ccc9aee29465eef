#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fidkit/error.hpp"

namespace fidkit {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using RVector = std::vector<double>;

// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, CVector data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(rows_ * cols_) +
                      " entries, got " + std::to_string(data_.size()));
    }
    if (!all_finite()) {
      throw Error(ErrorKind::Numerics, "matrix has non-finite entries");
    }
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) {
        throw Error(ErrorKind::DimensionMismatch, "ragged initializer");
      }
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  // |a><b|
  static ComplexMatrix outer(std::span<const cplx> a, std::span<const cplx> b) {
    ComplexMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
  }

  static ComplexMatrix from_columns(const std::vector<CVector>& cols) {
    if (cols.empty()) return {};
    ComplexMatrix m(cols.front().size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != m.rows_) {
        throw Error(ErrorKind::DimensionMismatch, "column length differs");
      }
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  std::span<const cplx> data() const noexcept { return data_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  CVector column(std::size_t j) const {
    CVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, std::span<const cplx> c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  // Induced infinity norm (max absolute row sum).
  double inf_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "product of " + a.shape() + " and " + b.shape());
    }
    ComplexMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend CVector operator*(const ComplexMatrix& a, std::span<const cplx> x) {
    if (a.cols_ != x.size()) {
      throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
    }
    CVector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  std::string shape() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw Error(ErrorKind::DimensionMismatch, shape() + " vs " + o.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVector data_;
};

// <a|b>, conjugate-linear in the first argument.
inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "inner product of vectors of length " +
                                                  std::to_string(a.size()) + " and " +
                                                  std::to_string(b.size()));
  }
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm2(std::span<const cplx> a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(s);
}

inline double distance(std::span<const cplx> a, std::span<const cplx> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

inline CVector basis_vector(std::size_t dim, std::size_t k) {
  CVector v(dim);
  v[k] = 1.0;
  return v;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * cplx(0.5);
}

// ||U^dagger U - I||_F
inline double unitarity_residual(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::identity(u.cols())).frobenius_norm();
}

}  // namespace fidkit
