#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fidkit/config.hpp"
#include "fidkit/error.hpp"
#include "fidkit/linalg.hpp"
#include "fidkit/matrix.hpp"
#include "fidkit/random.hpp"
#include "fidkit/states.hpp"

namespace fidkit {

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": dimensions " +
                                                  std::to_string(a) + " and " +
                                                  std::to_string(b));
  }
}

inline double clamp_unit(double f, double slack) {
  if (f > 1.0 + slack) {
    throw Error(ErrorKind::Numerics, "fidelity " + std::to_string(f) + " exceeds 1");
  }
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace detail

// F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                       const Tolerances& tol = kDefaultTolerances) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "fidelity");
  const auto root_rho = psd_sqrt(rho.matrix(), tol);
  const auto inner_op = hermitian_part(root_rho * sigma.matrix() * root_rho);
  const double f = psd_sqrt(inner_op, tol, 1.0).trace().real();
  return detail::clamp_unit(f, tol.fidelity_clamp);
}

inline double pure_overlap(const PureState& psi, const PureState& phi) {
  detail::require_same_dim(psi.dim(), phi.dim(), "pure_overlap");
  return std::min(1.0, std::abs(inner(psi.amplitudes(), phi.amplitudes())));
}

// Probability that phi passes the test "is it psi?".
inline double test_pass_probability(const PureState& psi, const PureState& phi) {
  const double f = pure_overlap(psi, phi);
  return f * f;
}

// sum_i sqrt(p_i q_i) for probability vectors.
inline double classical_fidelity(const RVector& p, const RVector& q, double tol = 1e-10) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::BadDistribution, "lengths " + std::to_string(p.size()) + " and " +
                                                std::to_string(q.size()));
  }
  auto check = [&](const RVector& d, const char* name) {
    double total = 0.0;
    for (double x : d) {
      if (!(x >= 0.0)) throw Error(ErrorKind::BadDistribution, std::string(name) + " has a negative entry");
      total += x;
    }
    if (std::abs(total - 1.0) > tol) {
      throw Error(ErrorKind::BadDistribution,
                  std::string(name) + " sums to " + std::to_string(total));
    }
  };
  check(p, "p");
  check(q, "q");
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) f += std::sqrt(p[i] * q[i]);
  return std::min(f, 1.0);
}

struct UhlmannResult {
  double fidelity = 0.0;
  Purification psi0;
  Purification phi0;
  cplx overlap;  // <psi0|phi0>, real and >= 0
};

namespace detail {

// For purifications with amplitude matrices X_psi, X_phi (E x Q),
// <psi0| (V (x) I) |phi0> = tr(V C) with C = X_phi X_psi^dagger.
inline ComplexMatrix cross_operator(const Purification& psi0, const Purification& phi0) {
  return phi0.amplitude_matrix() * psi0.amplitude_matrix().adjoint();
}

inline Purification twist_environment(const ComplexMatrix& v, const Purification& p) {
  const auto x = v * p.amplitude_matrix();
  return Purification(p.dim_e(), p.dim_q(), PureState::normalized(CVector(x.data().begin(), x.data().end())));
}

inline void require_env(std::size_t dim_e, std::size_t dim_q) {
  if (dim_e < dim_q) {
    throw Error(ErrorKind::EnvTooSmall, "environment dimension " + std::to_string(dim_e) +
                                            " below system dimension " + std::to_string(dim_q));
  }
}

}  // namespace detail

// Purifications of rho and sigma on E (x) Q whose overlap attains F(rho, sigma).
// psi0 is the standard purification of rho; phi0 is the standard purification
// of sigma with its environment rotated by the polar factor of the cross
// operator.
inline UhlmannResult uhlmann_optimal_purifications(const DensityMatrix& rho,
                                                   const DensityMatrix& sigma,
                                                   std::size_t dim_e,
                                                   const Tolerances& tol = kDefaultTolerances) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "uhlmann_optimal_purifications");
  detail::require_env(dim_e, rho.dim());
  auto psi0 = standard_purification(rho, dim_e);
  const auto phi_std = standard_purification(sigma, dim_e);
  const auto cross = detail::cross_operator(psi0, phi_std);
  // max_V |tr(V C)| is attained at V = W^dagger where C = W P.
  const auto twist = polar_unitary(cross, tol).adjoint();
  auto phi0 = detail::twist_environment(twist, phi_std);

  cplx ov = inner(psi0.vector().amplitudes(), phi0.vector().amplitudes());
  const double mag = std::abs(ov);
  if (mag > 0.0) {
    const cplx phase = std::conj(ov) / mag;
    CVector amps = phi0.vector().amplitudes();
    for (auto& z : amps) z *= phase;
    phi0 = Purification(dim_e, rho.dim(), PureState::normalized(std::move(amps)));
  }
  ov = cplx(mag, 0.0);
  return {fidelity(rho, sigma, tol), std::move(psi0), std::move(phi0), ov};
}

struct VariationalTrace {
  int iterations = 0;
  // Running best overlap, restarts concatenated in index order.
  RVector best_overlap_per_iteration;
  double final = 0.0;
};

struct VariationalOptions {
  int restarts = 8;
  int max_iters = 500;
  double step_tol = 1e-10;
  double initial_step = 0.5;
};

// Ascent of |tr(V C)| over environment unitaries V with Cayley updates
// V <- (I - h/2 A)^{-1} (I + h/2 A) V, A the skew-Hermitian Riemannian
// gradient. The step doubles after an accepted move and halves otherwise.
inline VariationalTrace uhlmann_variational(const DensityMatrix& rho, const DensityMatrix& sigma,
                                            std::size_t dim_e, const VariationalOptions& opt,
                                            std::uint64_t seed,
                                            const Tolerances& tol = kDefaultTolerances) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "uhlmann_variational");
  detail::require_env(dim_e, rho.dim());
  const auto psi0 = standard_purification(rho, dim_e);
  const auto phi_std = standard_purification(sigma, dim_e);
  const auto cross = detail::cross_operator(psi0, phi_std);
  const auto id = ComplexMatrix::identity(dim_e);

  auto objective = [&](const ComplexMatrix& v) { return std::abs((v * cross).trace()); };

  std::vector<RVector> histories(static_cast<std::size_t>(std::max(opt.restarts, 0)));
  for (int r = 0; r < opt.restarts; ++r) {
    ComplexMatrix v = random_unitary(dim_e, derive_seed(seed, static_cast<std::uint64_t>(r)));
    double value = objective(v);
    double step = opt.initial_step;
    RVector& hist = histories[static_cast<std::size_t>(r)];
    for (int it = 0; it < opt.max_iters; ++it) {
      const ComplexMatrix vc = v * cross;
      const cplx z = vc.trace();
      const cplx phase = std::abs(z) > 0.0 ? std::conj(z) / std::abs(z) : cplx(1.0);
      const ComplexMatrix b = vc * phase;
      const ComplexMatrix grad = (b.adjoint() - b) * cplx(0.5);
      const double gnorm = grad.frobenius_norm();
      if (step * gnorm < opt.step_tol) {
        hist.push_back(value);
        break;
      }
      bool accepted = false;
      while (step * gnorm >= opt.step_tol) {
        const ComplexMatrix half = grad * cplx(0.5 * step);
        const ComplexMatrix cayley = solve(id - half, id + half);
        ComplexMatrix candidate = cayley * v;
        const double cand_value = objective(candidate);
        if (cand_value > value) {
          v = std::move(candidate);
          value = cand_value;
          step *= 2.0;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      hist.push_back(value);
      if (!accepted) break;
    }
  }

  VariationalTrace trace;
  double best = 0.0;
  for (const auto& hist : histories)
    for (double val : hist) {
      best = std::max(best, val);
      trace.best_overlap_per_iteration.push_back(best);
    }
  trace.iterations = static_cast<int>(trace.best_overlap_per_iteration.size());
  trace.final = best;

  const double f = fidelity(rho, sigma, tol);
  if (opt.restarts > 0 && best < f - 1e-3) {
    throw Error(ErrorKind::NoConvergence, "variational ascent stalled at " +
                                              std::to_string(best) + " below fidelity " +
                                              std::to_string(f));
  }
  return trace;
}

// Largest overlap over random environment rotations of sigma's purification.
// Every sample is checked against the Uhlmann bound.
inline double random_purification_sweep(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        std::size_t dim_e, std::size_t trials,
                                        std::uint64_t seed,
                                        const Tolerances& tol = kDefaultTolerances) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "random_purification_sweep");
  detail::require_env(dim_e, rho.dim());
  if (trials == 0) return 0.0;
  const auto psi0 = standard_purification(rho, dim_e);
  const auto phi_std = standard_purification(sigma, dim_e);
  const auto cross = detail::cross_operator(psi0, phi_std);
  const double f = fidelity(rho, sigma, tol);
  double best = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto v = random_unitary(dim_e, derive_seed(seed, t));
    const double sample = std::abs((v * cross).trace());
    if (sample > f + 1e-9) {
      throw Error(ErrorKind::Numerics, "sampled overlap " + std::to_string(sample) +
                                           " exceeds fidelity " + std::to_string(f));
    }
    best = std::max(best, sample);
  }
  return best;
}

}  // namespace fidkit
