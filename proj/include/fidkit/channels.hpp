#pragma once

// Quantum channels in Kraus form and their Stinespring dilations.
//
// Channel equality is Choi-matrix equality; Kraus lists are only defined up
// to a unitary mixing of the Kraus index and are never compared directly.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fidkit/config.hpp"
#include "fidkit/error.hpp"
#include "fidkit/linalg.hpp"
#include "fidkit/matrix.hpp"
#include "fidkit/states.hpp"

namespace fidkit {

class KrausChannel {
 public:
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  std::size_t size() const noexcept { return kraus_.size(); }

  // ||sum_k K_k^dagger K_k - I||_F
  double completeness_residual() const { return completeness_residual(kraus_, dim_); }

  static double completeness_residual(const std::vector<ComplexMatrix>& ops, std::size_t dim) {
    ComplexMatrix sum(dim, dim);
    for (const auto& k : ops) sum += k.adjoint() * k;
    return (sum - ComplexMatrix::identity(dim)).frobenius_norm();
  }

 private:
  KrausChannel(std::size_t dim, std::vector<ComplexMatrix> ops)
      : dim_(dim), kraus_(std::move(ops)) {}
  friend KrausChannel validate_kraus(std::vector<ComplexMatrix>, double);

  std::size_t dim_;
  std::vector<ComplexMatrix> kraus_;
};

inline KrausChannel validate_kraus(std::vector<ComplexMatrix> ops,
                                   double tol = kDefaultTolerances.kraus) {
  if (ops.empty()) throw Error(ErrorKind::DimensionMismatch, "empty Kraus list");
  const std::size_t d = ops.front().rows();
  for (const auto& k : ops) {
    if (!k.is_square() || k.rows() != d || d == 0) {
      throw Error(ErrorKind::DimensionMismatch,
                  "Kraus operator " + k.shape() + " in a list of dimension " + std::to_string(d));
    }
    if (!k.all_finite()) throw Error(ErrorKind::Numerics, "Kraus operator has non-finite entries");
  }
  const double res = KrausChannel::completeness_residual(ops, d);
  if (res > tol) {
    throw Error(ErrorKind::NotTracePreserving,
                "||sum K^dagger K - I||_F = " + std::to_string(res));
  }
  return KrausChannel(d, std::move(ops));
}

inline KrausChannel identity_channel(std::size_t dim) {
  return validate_kraus({ComplexMatrix::identity(dim)});
}

// sum_k K_k X K_k^dagger for an arbitrary operator X.
inline ComplexMatrix apply_operator(const KrausChannel& ch, const ComplexMatrix& x) {
  if (x.rows() != ch.dim() || x.cols() != ch.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "operator " + x.shape() + " on a channel of dimension " + std::to_string(ch.dim()));
  }
  ComplexMatrix out(ch.dim(), ch.dim());
  for (const auto& k : ch.kraus()) out += k * x * k.adjoint();
  return out;
}

inline DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& state) {
  return validate_density(apply_operator(ch, state.matrix()), 1e-8);
}

inline DensityMatrix apply(const KrausChannel& ch, const PureState& state) {
  if (state.dim() != ch.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension " + std::to_string(state.dim()) +
                                                  " vs channel " + std::to_string(ch.dim()));
  }
  return apply(ch, projector(state));
}

// g after e: Kraus operators G_j K_k, j outer.
inline KrausChannel compose(const KrausChannel& g, const KrausChannel& e) {
  if (g.dim() != e.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "composing channels of dimensions " +
                                                  std::to_string(g.dim()) + " and " +
                                                  std::to_string(e.dim()));
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(g.size() * e.size());
  for (const auto& gj : g.kraus())
    for (const auto& ek : e.kraus()) ops.push_back(gj * ek);
  // Completeness of the product is exact in exact arithmetic; allow roundoff
  // growth with the operator count.
  return validate_kraus(std::move(ops), 1e-8);
}

// (I (x) E)(|Omega><Omega|), |Omega> = sum_k |k>|k> unnormalized; the first
// factor is the reference, the second the channel output.
inline ComplexMatrix choi(const KrausChannel& ch) {
  const std::size_t d = ch.dim();
  ComplexMatrix c(d * d, d * d);
  for (const auto& k : ch.kraus())
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t i = 0; i < d; ++i) {
        const cplx kia = k(i, a);
        if (kia == cplx{}) continue;
        for (std::size_t b = 0; b < d; ++b)
          for (std::size_t j = 0; j < d; ++j)
            c(composite_index(a, i, d), composite_index(b, j, d)) += kia * std::conj(k(j, b));
      }
  return c;
}

inline double choi_distance(const KrausChannel& a, const KrausChannel& b) {
  return (choi(a) - choi(b)).frobenius_norm();
}

struct StinespringDilation {
  std::size_t dim_q = 0;
  std::size_t dim_e = 0;
  ComplexMatrix unitary;  // on E (x) Q, environment first
  std::size_t env_init_index = 0;
};

// Environment of dimension dimQ^2; Kraus lists shorter than that are padded
// with zero operators. The isometry beta -> sum_k |k>_E K_k beta fills the
// columns of the |env_init_index>_E block and the rest of U is completed by
// Gram-Schmidt over standard basis candidates.
inline StinespringDilation stinespring_dilate(const KrausChannel& ch) {
  const std::size_t dq = ch.dim();
  const std::size_t de = dq * dq;
  if (ch.size() > de) {
    throw Error(ErrorKind::TooManyKraus, std::to_string(ch.size()) + " Kraus operators exceed " +
                                             std::to_string(de));
  }
  const std::size_t n = de * dq;
  const std::size_t env0 = 0;

  std::vector<CVector> iso(dq, CVector(n));
  for (std::size_t k = 0; k < ch.size(); ++k)
    for (std::size_t i = 0; i < dq; ++i)
      for (std::size_t j = 0; j < dq; ++j) iso[j][composite_index(k, i, dq)] = ch.kraus()[k](i, j);

  auto basis = complete_basis(iso, n);
  ComplexMatrix u(n, n);
  for (std::size_t j = 0; j < dq; ++j) u.set_column(composite_index(env0, j, dq), basis[j]);
  std::size_t next = dq;
  for (std::size_t col = 0; col < n; ++col) {
    if (col / dq == env0) continue;
    u.set_column(col, basis[next++]);
  }
  const double res = unitarity_residual(u);
  if (res > 1e-9) {
    throw Error(ErrorKind::CompletionFailure, "||U^dagger U - I||_F = " + std::to_string(res));
  }
  return {dq, de, std::move(u), env0};
}

// tr_E[U (|e0><e0| (x) X) U^dagger] for an arbitrary operator X on Q.
inline ComplexMatrix apply_dilation_operator(const StinespringDilation& d, const ComplexMatrix& x) {
  if (x.rows() != d.dim_q || x.cols() != d.dim_q) {
    throw Error(ErrorKind::DimensionMismatch,
                "operator " + x.shape() + " on a dilation of dimension " + std::to_string(d.dim_q));
  }
  ComplexMatrix env(d.dim_e, d.dim_e);
  env(d.env_init_index, d.env_init_index) = 1.0;
  const auto joint = d.unitary * kron(env, x) * d.unitary.adjoint();
  return partial_trace_env(joint, d.dim_e, d.dim_q);
}

inline DensityMatrix apply_dilation(const StinespringDilation& d, const DensityMatrix& state) {
  return validate_density(apply_dilation_operator(d, state.matrix()), 1e-8);
}

inline DensityMatrix apply_dilation(const StinespringDilation& d, const PureState& state) {
  if (state.dim() != d.dim_q) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension " + std::to_string(state.dim()) +
                                                  " vs dilation " + std::to_string(d.dim_q));
  }
  return apply_dilation(d, projector(state));
}

// Choi matrix of the channel realized by the dilation, built from its action
// on the operator basis |a><b|.
inline ComplexMatrix dilation_choi(const StinespringDilation& d) {
  const std::size_t dq = d.dim_q;
  ComplexMatrix c(dq * dq, dq * dq);
  for (std::size_t a = 0; a < dq; ++a)
    for (std::size_t b = 0; b < dq; ++b) {
      ComplexMatrix unit(dq, dq);
      unit(a, b) = 1.0;
      const auto out = apply_dilation_operator(d, unit);
      for (std::size_t i = 0; i < dq; ++i)
        for (std::size_t j = 0; j < dq; ++j)
          c(composite_index(a, i, dq), composite_index(b, j, dq)) = out(i, j);
    }
  return c;
}

// K_k(i, j) = U(k dimQ + i, env_init dimQ + j); exactly-zero operators are dropped.
inline KrausChannel kraus_from_dilation(const StinespringDilation& d) {
  const std::size_t dq = d.dim_q;
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < d.dim_e; ++k) {
    ComplexMatrix op(dq, dq);
    for (std::size_t i = 0; i < dq; ++i)
      for (std::size_t j = 0; j < dq; ++j)
        op(i, j) = d.unitary(composite_index(k, i, dq), composite_index(d.env_init_index, j, dq));
    if (op.frobenius_norm() > 0.0) ops.push_back(std::move(op));
  }
  return validate_kraus(std::move(ops));
}

// Haar isometry Q -> E' (x) Q with dimE' = kraus_rank, sliced from a Haar unitary.
inline KrausChannel random_channel(std::size_t dim_q, std::size_t kraus_rank, std::uint64_t seed) {
  if (dim_q == 0 || kraus_rank == 0 || kraus_rank > dim_q * dim_q) {
    throw Error(ErrorKind::BadRank, "Kraus rank " + std::to_string(kraus_rank) +
                                        " for dimension " + std::to_string(dim_q));
  }
  const auto u = random_unitary(kraus_rank * dim_q, seed);
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < kraus_rank; ++k) {
    ComplexMatrix op(dim_q, dim_q);
    for (std::size_t i = 0; i < dim_q; ++i)
      for (std::size_t j = 0; j < dim_q; ++j) op(i, j) = u(composite_index(k, i, dim_q), j);
    ops.push_back(std::move(op));
  }
  return validate_kraus(std::move(ops));
}

}  // namespace fidkit
