#pragma once

// Dense complex kernels: Hermitian eigensolver (cyclic Jacobi), PSD square
// root, SVD, polar factor, trace norm, Kronecker product, partial trace.
//
// Tensor ordering is environment-first everywhere: on E (x) Q the composite
// index of (e, q) is e * dimQ + q. Use composite_index() rather than
// spelling the arithmetic out.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "fidkit/config.hpp"
#include "fidkit/error.hpp"
#include "fidkit/matrix.hpp"

namespace fidkit {

constexpr std::size_t composite_index(std::size_t e, std::size_t q, std::size_t dim_q) {
  return e * dim_q + q;
}

struct HermEigResult {
  RVector eigenvalues;        // ascending
  ComplexMatrix eigenvectors;  // columns, orthonormal
};

namespace detail {

inline double offdiag_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Make the first component with non-negligible magnitude real positive.
inline void canonicalize_phase(ComplexMatrix& v, std::size_t col) {
  for (std::size_t i = 0; i < v.rows(); ++i) {
    const double mag = std::abs(v(i, col));
    if (mag > 1e-10) {
      const cplx ph = std::conj(v(i, col)) / mag;
      for (std::size_t k = 0; k < v.rows(); ++k) v(k, col) *= ph;
      v(i, col) = mag;
      return;
    }
  }
}

}  // namespace detail

inline HermEigResult herm_eig(const ComplexMatrix& m,
                              const Tolerances& tol = kDefaultTolerances) {
  if (!m.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, "herm_eig needs a square matrix, got " + m.shape());
  }
  const std::size_t n = m.rows();
  const double norm_f = m.frobenius_norm();
  const double asym = (m - m.adjoint()).frobenius_norm();
  if (asym > tol.eig * std::max(1.0, norm_f)) {
    throw Error(ErrorKind::NotHermitian,
                "||M - M^dagger||_F = " + std::to_string(asym));
  }

  ComplexMatrix a = hermitian_part(m);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double target = tol.jacobi_offdiag * norm_f;

  bool converged = false;
  for (int sweep = 0; sweep <= tol.jacobi_max_sweeps; ++sweep) {
    if (detail::offdiag_norm(a) <= target) {
      converged = true;
      break;
    }
    if (sweep == tol.jacobi_max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx b = a(p, q);
        const double ab = std::abs(b);
        if (ab == 0.0) continue;
        // Phase e^{-i arg b} on column q makes the pivot real, then a real
        // Jacobi rotation annihilates it.
        const cplx phase = std::conj(b) / ab;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * ab);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        const cplx wpp = c, wpq = s, wqp = -s * phase, wqq = c * phase;

        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * wpp + akq * wqp;
          a(k, q) = akp * wpq + akq * wqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(wpp) * apk + std::conj(wqp) * aqk;
          a(q, k) = std::conj(wpq) * apk + std::conj(wqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * wpp + vkq * wqp;
          v(k, q) = vkp * wpq + vkq * wqq;
        }
      }
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence,
                "Jacobi did not converge in " + std::to_string(tol.jacobi_max_sweeps) +
                    " sweeps (off-diagonal " + std::to_string(detail::offdiag_norm(a)) + ")");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  HermEigResult out{RVector(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    detail::canonicalize_phase(out.eigenvectors, k);
  }
  return out;
}

// Hermitian PSD square root. Negatives down to -tol.eig * ||M||_inf are
// roundoff and clipped; anything more negative is an error. A positive
// scale raises both thresholds when M is known to be a product of
// quantities of that size (so an all-roundoff M maps to zero).
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m,
                              const Tolerances& tol = kDefaultTolerances, double scale = 0.0) {
  const auto eig = herm_eig(m, tol);
  const double neg_limit = tol.eig * std::max(m.inf_norm(), scale);
  double lam_max = scale;
  for (double l : eig.eigenvalues) lam_max = std::max(lam_max, std::abs(l));
  const double floor = tol.spectral_floor * lam_max;

  const std::size_t n = m.rows();
  ComplexMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eig.eigenvalues[k];
    if (lam < -neg_limit) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "eigenvalue %.3g below -%.3g", lam, neg_limit);
      throw Error(ErrorKind::NotPSD, buf);
    }
    if (lam <= floor) continue;
    const double root = std::sqrt(lam);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = eig.eigenvectors(i, k) * root;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vi * std::conj(eig.eigenvectors(j, k));
    }
  }
  return hermitian_part(r);
}

// Extends an orthonormal family to a full orthonormal basis of C^dim using
// standard basis candidates in order (two-pass modified Gram-Schmidt,
// candidates with residual norm below gs_tol are skipped).
inline std::vector<CVector> complete_basis(std::vector<CVector> family, std::size_t dim,
                                           double gs_tol = kDefaultTolerances.gram_schmidt) {
  for (std::size_t k = 0; k < dim && family.size() < dim; ++k) {
    CVector w = basis_vector(dim, k);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& f : family) {
        const cplx proj = inner(f, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * f[i];
      }
    const double r = norm2(w);
    if (r < gs_tol) continue;
    for (auto& z : w) z /= r;
    family.push_back(std::move(w));
  }
  if (family.size() != dim) {
    throw Error(ErrorKind::CompletionFailure,
                "obtained " + std::to_string(family.size()) + " of " + std::to_string(dim) +
                    " basis vectors");
  }
  return family;
}

struct SvdResult {
  ComplexMatrix u;  // orthonormal columns
  RVector s;        // descending, >= 0
  ComplexMatrix v;  // orthonormal columns
};

// Thin SVD M = U diag(s) V^dagger, via the eigenvectors of M^dagger M. Singular
// values are read off as ||M v_i|| after re-orthogonalizing the images, which
// keeps small singular values accurate to roundoff of ||M||.
inline SvdResult svd(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances) {
  if (m.rows() < m.cols()) {
    auto t = svd(m.adjoint(), tol);
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
  }
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();

  const auto eig = herm_eig(m.adjoint() * m, tol);
  std::vector<CVector> right(n), images(n);
  for (std::size_t k = 0; k < n; ++k) {
    right[k] = eig.eigenvectors.column(n - 1 - k);  // descending eigenvalues
    images[k] = m * right[k];
  }
  double s_max = 0.0;
  for (const auto& w : images) s_max = std::max(s_max, norm2(w));
  const double null_threshold = 1e-13 * s_max;

  std::vector<CVector> left;
  std::vector<std::size_t> left_slot;
  RVector s(n, 0.0);
  std::vector<bool> is_null(n, true);
  for (std::size_t k = 0; k < n; ++k) {
    CVector w = images[k];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : left) {
        const cplx proj = inner(u, w);
        for (std::size_t i = 0; i < rows; ++i) w[i] -= proj * u[i];
      }
    const double r = norm2(w);
    if (s_max == 0.0 || r <= null_threshold) continue;
    for (auto& z : w) z /= r;
    left.push_back(std::move(w));
    left_slot.push_back(k);
    s[k] = r;
    is_null[k] = false;
  }

  // Null directions get left vectors from the orthogonal complement.
  const std::size_t found = left.size();
  auto full = complete_basis(left, rows, 1e-8);
  std::vector<CVector> u_cols(n);
  for (std::size_t j = 0; j < found; ++j) u_cols[left_slot[j]] = std::move(full[j]);
  std::size_t next = found;
  for (std::size_t k = 0; k < n; ++k)
    if (is_null[k]) u_cols[k] = std::move(full[next++]);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });

  SvdResult out{ComplexMatrix(rows, n), RVector(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.s[k] = s[order[k]];
    out.u.set_column(k, u_cols[order[k]]);
    out.v.set_column(k, right[order[k]]);
  }
  return out;
}

// Unitary polar factor W = U V^dagger; maximizes Re tr(X^dagger M) over unitaries X.
inline ComplexMatrix polar_unitary(const ComplexMatrix& m,
                                   const Tolerances& tol = kDefaultTolerances) {
  if (!m.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, "polar_unitary needs a square matrix");
  }
  const auto r = svd(m, tol);
  return r.u * r.v.adjoint();
}

inline double trace_norm(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances) {
  const auto r = svd(m, tol);
  return std::accumulate(r.s.begin(), r.s.end(), 0.0);
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t e = 0; e < a.rows(); ++e)
    for (std::size_t f = 0; f < a.cols(); ++f) {
      const cplx aef = a(e, f);
      if (aef == cplx{}) continue;
      for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
          r(e * b.rows() + i, f * b.cols() + j) = aef * b(i, j);
    }
  return r;
}

inline CVector kron(std::span<const cplx> a, std::span<const cplx> b) {
  CVector r(a.size() * b.size());
  for (std::size_t e = 0; e < a.size(); ++e)
    for (std::size_t i = 0; i < b.size(); ++i) r[composite_index(e, i, b.size())] = a[e] * b[i];
  return r;
}

// tr_E of an operator on E (x) Q.
inline ComplexMatrix partial_trace_env(const ComplexMatrix& m, std::size_t dim_e,
                                       std::size_t dim_q) {
  const std::size_t n = dim_e * dim_q;
  if (dim_e == 0 || dim_q == 0 || m.rows() != n || m.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "partial trace of " + m.shape() + " over " + std::to_string(dim_e) + "x" +
                    std::to_string(dim_q));
  }
  ComplexMatrix r(dim_q, dim_q);
  for (std::size_t e = 0; e < dim_e; ++e)
    for (std::size_t i = 0; i < dim_q; ++i)
      for (std::size_t j = 0; j < dim_q; ++j)
        r(i, j) += m(composite_index(e, i, dim_q), composite_index(e, j, dim_q));
  return r;
}

// Solves A X = B by Gaussian elimination with partial pivoting.
inline ComplexMatrix solve(ComplexMatrix a, ComplexMatrix b) {
  if (!a.is_square() || a.rows() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "solve " + a.shape() + " with " + b.shape());
  }
  const std::size_t n = a.rows();
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) <= 1e-14 * scale) {
      throw Error(ErrorKind::Numerics, "singular system in solve");
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const cplx f = a(i, col) / a(col, col);
      if (f == cplx{}) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx acc = b(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) acc -= a(ii, k) * b(k, j);
      b(ii, j) = acc / a(ii, ii);
    }
  }
  return b;
}

}  // namespace fidkit
