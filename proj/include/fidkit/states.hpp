#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "fidkit/config.hpp"
#include "fidkit/error.hpp"
#include "fidkit/linalg.hpp"
#include "fidkit/matrix.hpp"
#include "fidkit/random.hpp"

namespace fidkit {

// What validate_density had to repair to admit a matrix.
struct DensityCorrections {
  double hermiticity_deviation = 0.0;  // ||M - M^dagger||_F
  double trace_deviation = 0.0;        // |tr M - 1|
  double clipped_negative_mass = 0.0;  // sum of |negative eigenvalues| removed
};

// Hermitian, positive-semidefinite, unit-trace matrix. Only obtainable
// through validate_density.
class DensityMatrix {
 public:
  std::size_t dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const DensityCorrections& corrections() const noexcept { return corrections_; }

 private:
  DensityMatrix(ComplexMatrix m, DensityCorrections c)
      : matrix_(std::move(m)), corrections_(c) {}

  friend DensityMatrix validate_density(const ComplexMatrix&, double);

  ComplexMatrix matrix_;
  DensityCorrections corrections_;
};

inline DensityMatrix validate_density(const ComplexMatrix& m,
                                      double tol = kDefaultTolerances.density) {
  if (!m.is_square() || m.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "density matrix must be square, got " + m.shape());
  }
  if (!m.all_finite()) throw Error(ErrorKind::Numerics, "density matrix has non-finite entries");

  DensityCorrections corr;
  corr.hermiticity_deviation = (m - m.adjoint()).frobenius_norm();
  if (corr.hermiticity_deviation > tol * std::max(1.0, m.frobenius_norm())) {
    throw Error(ErrorKind::NotHermitian,
                "||M - M^dagger||_F = " + std::to_string(corr.hermiticity_deviation));
  }
  ComplexMatrix h = hermitian_part(m);

  const double tr = h.trace().real();
  corr.trace_deviation = std::abs(tr - 1.0);
  if (corr.trace_deviation > tol) {
    throw Error(ErrorKind::BadTrace, "trace is " + std::to_string(tr));
  }

  const auto eig = herm_eig(h);
  const double lam_min = eig.eigenvalues.front();
  if (lam_min < -tol) {
    throw Error(ErrorKind::NotPSD, "smallest eigenvalue is " + std::to_string(lam_min));
  }
  // Negatives within the eigensolver's resolution are left alone so that
  // validating an already-valid matrix returns it bit for bit.
  const double resolution = kDefaultTolerances.spectral_floor * std::abs(eig.eigenvalues.back());
  bool rebuilt = false;
  if (lam_min < -resolution) {
    rebuilt = true;
    const std::size_t n = h.rows();
    ComplexMatrix clipped(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const double lam = eig.eigenvalues[k];
      if (lam <= 0.0) {
        corr.clipped_negative_mass += -lam;
        continue;
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          clipped(i, j) += lam * eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
    }
    h = hermitian_part(clipped);
  }
  const double new_tr = h.trace().real();
  const double trace_resolution = 4.0 * std::numeric_limits<double>::epsilon() * double(h.rows());
  if (rebuilt || std::abs(new_tr - 1.0) > trace_resolution) h *= 1.0 / new_tr;
  return DensityMatrix(std::move(h), corr);
}

// Unit-norm state vector.
class PureState {
 public:
  std::size_t dim() const noexcept { return amplitudes_.size(); }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }

  // Rescales any nonzero finite vector to unit norm.
  static PureState normalized(CVector v) {
    const double n = norm2(v);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw Error(ErrorKind::NotNormalized, "cannot normalize a zero or non-finite vector");
    }
    for (auto& z : v) z /= n;
    return PureState(std::move(v));
  }

  static PureState basis(std::size_t dim, std::size_t k) {
    return PureState(basis_vector(dim, k));
  }

 private:
  explicit PureState(CVector v) : amplitudes_(std::move(v)) {}
  friend PureState validate_pure(CVector, double);

  CVector amplitudes_;
};

inline PureState validate_pure(CVector v, double tol = kDefaultTolerances.pure_norm) {
  if (v.empty()) throw Error(ErrorKind::DimensionMismatch, "empty state vector");
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorKind::Numerics, "state vector has non-finite entries");
  const double n = norm2(v);
  if (std::abs(n - 1.0) > tol) {
    throw Error(ErrorKind::NotNormalized, "norm is " + std::to_string(n));
  }
  // Norms within a few ulps of 1 are kept so validation is idempotent.
  const double resolution = 4.0 * std::numeric_limits<double>::epsilon() * double(v.size());
  if (std::abs(n - 1.0) > resolution)
    for (auto& z : v) z /= n;
  return PureState(std::move(v));
}

inline DensityMatrix projector(const PureState& psi) {
  return validate_density(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()));
}

// Pure state on E (x) Q, environment first.
class Purification {
 public:
  Purification(std::size_t dim_e, std::size_t dim_q, PureState vector)
      : dim_e_(dim_e), dim_q_(dim_q), vector_(std::move(vector)) {
    if (dim_e_ == 0 || dim_q_ == 0 || vector_.dim() != dim_e_ * dim_q_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "purification of length " + std::to_string(vector_.dim()) + " on " +
                      std::to_string(dim_e_) + "x" + std::to_string(dim_q_));
    }
  }

  std::size_t dim_e() const noexcept { return dim_e_; }
  std::size_t dim_q() const noexcept { return dim_q_; }
  const PureState& vector() const noexcept { return vector_; }

  // Amplitudes reshaped as a dimE x dimQ matrix X(e, q).
  ComplexMatrix amplitude_matrix() const {
    return ComplexMatrix(dim_e_, dim_q_, vector_.amplitudes());
  }

 private:
  std::size_t dim_e_;
  std::size_t dim_q_;
  PureState vector_;
};

inline DensityMatrix reduce(const Purification& p) {
  const auto x = p.amplitude_matrix();
  // tr_E |v><v| = X^T conj(X)
  return validate_density(x.transpose() * x.transpose().adjoint(), 1e-9);
}

inline std::size_t numerical_rank(const RVector& eigenvalues, double tol = 1e-10) {
  return static_cast<std::size_t>(
      std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double l) { return l > tol; }));
}

// sum_i sqrt(p_i) |i>_E |u_i>_Q with eigenvalues taken in descending order.
inline Purification standard_purification(const DensityMatrix& rho, std::size_t dim_e) {
  const std::size_t dq = rho.dim();
  const auto eig = herm_eig(rho.matrix());
  const std::size_t rank = numerical_rank(eig.eigenvalues);
  if (dim_e < rank || dim_e == 0) {
    throw Error(ErrorKind::EnvTooSmall, "environment dimension " + std::to_string(dim_e) +
                                            " below rank " + std::to_string(rank));
  }
  const double floor = kDefaultTolerances.spectral_floor * eig.eigenvalues.back();
  CVector v(dim_e * dq);
  for (std::size_t k = 0; k < std::min(dim_e, dq); ++k) {
    const double p = eig.eigenvalues[dq - 1 - k];
    if (p <= floor) continue;
    const double amp = std::sqrt(p);
    for (std::size_t q = 0; q < dq; ++q)
      v[composite_index(k, q, dq)] = amp * eig.eigenvectors(q, dq - 1 - k);
  }
  return Purification(dim_e, dq, PureState::normalized(std::move(v)));
}

inline DensityMatrix random_density(std::size_t dim, std::size_t rank, std::uint64_t seed) {
  if (dim == 0 || rank == 0 || rank > dim) {
    throw Error(ErrorKind::BadRank, "rank " + std::to_string(rank) + " for dimension " +
                                        std::to_string(dim));
  }
  Rng rng(seed);
  const auto g = rng.gaussian_matrix(dim, rank);
  ComplexMatrix m = g * g.adjoint();
  m *= 1.0 / m.trace().real();
  return validate_density(m);
}

inline PureState random_pure(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::DimensionMismatch, "dimension must be positive");
  Rng rng(seed);
  return PureState::normalized(rng.gaussian_vector(dim));
}

// Haar unitary: Gram-Schmidt on a complex Ginibre matrix, so the triangular
// factor has a real positive diagonal.
inline ComplexMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::DimensionMismatch, "dimension must be positive");
  Rng rng(seed);
  const auto g = rng.gaussian_matrix(dim, dim);
  std::vector<CVector> cols;
  for (std::size_t j = 0; j < dim; ++j) {
    CVector w = g.column(j);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : cols) {
        const cplx proj = inner(q, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * q[i];
      }
    const double r = norm2(w);
    for (auto& z : w) z /= r;
    cols.push_back(std::move(w));
  }
  return ComplexMatrix::from_columns(cols);
}

}  // namespace fidkit
