#pragma once

namespace fidkit {

// Numerical thresholds shared by every module. Operations take an optional
// override; the property suites tighten or loosen these uniformly.
struct Tolerances {
  // Hermiticity precondition and negative-eigenvalue clipping, relative.
  double eig = 1e-10;
  // Jacobi stops when off-diagonal Frobenius mass <= jacobi_offdiag * |M|_F.
  double jacobi_offdiag = 1e-14;
  int jacobi_max_sweeps = 100;
  // Eigenvalues with |lambda| <= spectral_floor * max|lambda| are treated as
  // exact zeros by psd_sqrt (they are below the eigensolver's resolution).
  double spectral_floor = 1e-14;
  // Density-matrix admission (hermiticity, trace, positivity).
  double density = 1e-10;
  // Pure-state norm.
  double pure_norm = 1e-12;
  // Kraus completeness.
  double kraus = 1e-9;
  // Fidelity values within this of 1 are clamped; beyond is a hard error.
  double fidelity_clamp = 1e-9;
  // Linear-dependence threshold for Gram-Schmidt residuals.
  double gram_schmidt = 1e-8;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace fidkit
