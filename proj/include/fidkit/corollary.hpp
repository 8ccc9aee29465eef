#pragma once

// Operational form of the fidelity: F(rho, sigma) is the largest overlap
// |<psi|phi>| of pure states that one channel maps to rho and sigma. This
// header builds an explicit witness (psi, phi, E) attaining it and the checks
// for the bound in the other direction and for monotonicity under channels.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fidkit/channels.hpp"
#include "fidkit/config.hpp"
#include "fidkit/error.hpp"
#include "fidkit/fidelity.hpp"
#include "fidkit/linalg.hpp"
#include "fidkit/matrix.hpp"
#include "fidkit/states.hpp"

namespace fidkit {

namespace detail {

// Orthonormal basis of the full space whose leading vectors span
// {first, second} (just {first} when the pair is dependent).
inline std::vector<CVector> pair_frame(const CVector& first, const CVector& second,
                                       bool dependent) {
  std::vector<CVector> frame{first};
  if (!dependent) {
    CVector w = second;
    for (int pass = 0; pass < 2; ++pass) {
      const cplx proj = inner(frame.front(), w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= proj * frame.front()[i];
    }
    const double r = norm2(w);
    for (auto& z : w) z /= r;
    frame.push_back(std::move(w));
  }
  return complete_basis(std::move(frame), first.size());
}

inline double orthogonal_residual(const CVector& first, const CVector& second) {
  const cplx proj = inner(first, second);
  CVector w = second;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= proj * first[i];
  return norm2(w);
}

}  // namespace detail

// Unitary U with U a1 = b1 and U a2 = b2, given <a1|a2> = <b1|b2>.
inline ComplexMatrix two_pair_unitary(const PureState& a1, const PureState& a2,
                                      const PureState& b1, const PureState& b2,
                                      double tol = 1e-9,
                                      double dependence_tol = kDefaultTolerances.gram_schmidt) {
  const std::size_t d = a1.dim();
  if (a2.dim() != d || b1.dim() != d || b2.dim() != d) {
    throw Error(ErrorKind::DimensionMismatch, "two_pair_unitary needs four vectors of one dimension");
  }
  const cplx ga = inner(a1.amplitudes(), a2.amplitudes());
  const cplx gb = inner(b1.amplitudes(), b2.amplitudes());
  if (std::abs(ga - gb) > tol) {
    throw Error(ErrorKind::GramMismatch,
                "<a1|a2> = (" + std::to_string(ga.real()) + ", " + std::to_string(ga.imag()) +
                    ") but <b1|b2> = (" + std::to_string(gb.real()) + ", " +
                    std::to_string(gb.imag()) + ")");
  }
  const double ra = detail::orthogonal_residual(a1.amplitudes(), a2.amplitudes());
  const double rb = detail::orthogonal_residual(b1.amplitudes(), b2.amplitudes());
  const bool dependent = std::max(ra, rb) < dependence_tol;

  const auto from = detail::pair_frame(a1.amplitudes(), a2.amplitudes(), dependent);
  const auto to = detail::pair_frame(b1.amplitudes(), b2.amplitudes(), dependent);
  ComplexMatrix u(d, d);
  for (std::size_t k = 0; k < d; ++k) u += ComplexMatrix::outer(to[k], from[k]);
  return u;
}

struct CorollaryWitness {
  PureState psi;
  PureState phi;
  KrausChannel channel;
  double overlap = 0.0;
  double fidelity_target = 0.0;
};

// psi = e0, phi = F e0 + sqrt(1 - F^2) e1 on Q; U on E (x) Q with dimE = dimQ
// sends |0>|psi>, |0>|phi> to the optimal Uhlmann purifications of rho and
// sigma, and the channel is alpha -> tr_E[U (|0><0| (x) alpha) U^dagger].
inline CorollaryWitness construct_witness(const DensityMatrix& rho, const DensityMatrix& sigma,
                                          const Tolerances& tol = kDefaultTolerances) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "construct_witness");
  const std::size_t dq = rho.dim();
  if (dq == 1) {
    const auto one = PureState::basis(1, 0);
    return {one, one, identity_channel(1), 1.0, 1.0};
  }

  const auto uh = uhlmann_optimal_purifications(rho, sigma, dq, tol);
  const double f = std::clamp(uh.overlap.real(), 0.0, 1.0);

  const auto psi = PureState::basis(dq, 0);
  CVector phi_amps(dq);
  phi_amps[0] = f;
  phi_amps[1] = std::sqrt(std::max(0.0, 1.0 - f * f));
  const auto phi = PureState::normalized(std::move(phi_amps));

  const auto env0 = basis_vector(dq, 0);
  const auto lifted_psi = PureState::normalized(kron(env0, psi.amplitudes()));
  const auto lifted_phi = PureState::normalized(kron(env0, phi.amplitudes()));
  auto u = two_pair_unitary(lifted_psi, lifted_phi, uh.psi0.vector(), uh.phi0.vector());

  const StinespringDilation dilation{dq, dq, std::move(u), 0};
  auto channel = kraus_from_dilation(dilation);
  const double overlap = pure_overlap(psi, phi);
  return {psi, phi, std::move(channel), overlap, uh.fidelity};
}

struct WitnessReport {
  double psi_residual = 0.0;      // ||E(psi) - rho||_F
  double phi_residual = 0.0;      // ||E(phi) - sigma||_F
  double overlap_residual = 0.0;  // | |<psi|phi>| - F(rho, sigma) |
  bool pass = false;
};

inline WitnessReport verify_witness(const CorollaryWitness& w, const DensityMatrix& rho,
                                    const DensityMatrix& sigma, double tol = 1e-8) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "verify_witness");
  detail::require_same_dim(w.channel.dim(), rho.dim(), "verify_witness");
  WitnessReport r;
  r.psi_residual = (apply(w.channel, w.psi).matrix() - rho.matrix()).frobenius_norm();
  r.phi_residual = (apply(w.channel, w.phi).matrix() - sigma.matrix()).frobenius_norm();
  const double f = fidelity(rho, sigma);
  r.overlap_residual = std::max(std::abs(pure_overlap(w.psi, w.phi) - f), std::abs(w.overlap - f));
  r.pass = r.psi_residual <= tol && r.phi_residual <= tol && r.overlap_residual <= tol;
  return r;
}

// F(E(psi), E(phi)) - |<psi|phi>|; never below zero for a valid channel.
inline double overlap_upper_bound_check(const KrausChannel& ch, const PureState& psi,
                                        const PureState& phi) {
  detail::require_same_dim(psi.dim(), phi.dim(), "overlap_upper_bound_check");
  detail::require_same_dim(ch.dim(), psi.dim(), "overlap_upper_bound_check");
  return fidelity(apply(ch, psi), apply(ch, phi)) - pure_overlap(psi, phi);
}

// F(G(rho), G(sigma)) - F(rho, sigma); never below zero for a valid channel.
inline double monotonicity_check(const KrausChannel& g, const DensityMatrix& rho,
                                 const DensityMatrix& sigma) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "monotonicity_check");
  detail::require_same_dim(g.dim(), rho.dim(), "monotonicity_check");
  return fidelity(apply(g, rho), apply(g, sigma)) - fidelity(rho, sigma);
}

struct MonotonicityReport {
  WitnessReport witness;
  double composed_psi_residual = 0.0;  // ||(G o E)(psi) - G(rho)||_F
  double composed_phi_residual = 0.0;  // ||(G o E)(phi) - G(sigma)||_F
  double bound_residual = 0.0;         // F((G o E)(psi), (G o E)(phi)) - |<psi|phi>|
  double direct_residual = 0.0;        // F(G(rho), G(sigma)) - F(rho, sigma)
  bool pass = false;
};

// Monotonicity through the witness: G o E carries (psi, phi) to (G(rho),
// G(sigma)), so F(G(rho), G(sigma)) >= |<psi|phi>| = F(rho, sigma).
inline MonotonicityReport monotonicity_via_witness(const KrausChannel& g, const DensityMatrix& rho,
                                                   const DensityMatrix& sigma, double tol = 1e-8) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "monotonicity_via_witness");
  detail::require_same_dim(g.dim(), rho.dim(), "monotonicity_via_witness");
  MonotonicityReport r;
  const auto w = construct_witness(rho, sigma);
  r.witness = verify_witness(w, rho, sigma, tol);

  const auto composed = compose(g, w.channel);
  const auto g_rho = apply(g, rho);
  const auto g_sigma = apply(g, sigma);
  r.composed_psi_residual = (apply(composed, w.psi).matrix() - g_rho.matrix()).frobenius_norm();
  r.composed_phi_residual = (apply(composed, w.phi).matrix() - g_sigma.matrix()).frobenius_norm();
  r.bound_residual = overlap_upper_bound_check(composed, w.psi, w.phi);
  r.direct_residual = fidelity(g_rho, g_sigma) - fidelity(rho, sigma);
  r.pass = r.witness.pass && r.composed_psi_residual <= tol && r.composed_phi_residual <= tol &&
           r.bound_residual >= -tol && r.direct_residual >= -tol;
  return r;
}

}  // namespace fidkit
