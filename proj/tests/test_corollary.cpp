#include "fidkit/corollary.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace fidkit;
using fidkit::testing::max_abs_diff;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const ComplexMatrix kX{{0.0, 1.0}, {1.0, 0.0}};

DensityMatrix diag(std::initializer_list<double> d) {
  return validate_density(ComplexMatrix::diagonal(d));
}

KrausChannel depolarizing() {
  const cplx i{0.0, 1.0};
  return validate_kraus({ComplexMatrix::identity(2) * 0.5, kX * 0.5,
                         ComplexMatrix{{0.0, -i}, {i, 0.0}} * 0.5,
                         ComplexMatrix::diagonal({1.0, -1.0}) * 0.5});
}

KrausChannel bit_flip(double p) {
  return validate_kraus({ComplexMatrix::identity(2) * std::sqrt(1.0 - p), kX * std::sqrt(p)});
}

}  // namespace

TEST(two_pair_unitary, identical_pairs) {
  const auto a1 = random_pure(3, 1), a2 = random_pure(3, 2);
  const auto u = two_pair_unitary(a1, a2, a1, a2);
  EXPECT_LE(unitarity_residual(u), 1e-9);
  EXPECT_LE(distance(u * a1.amplitudes(), a1.amplitudes()), 1e-12);
  EXPECT_LE(distance(u * a2.amplitudes(), a2.amplitudes()), 1e-12);
}

TEST(two_pair_unitary, dependent_pairs) {
  const auto a = random_pure(4, 3), b = random_pure(4, 4);
  const auto u = two_pair_unitary(a, a, b, b);
  EXPECT_LE(unitarity_residual(u), 1e-9);
  EXPECT_LE(distance(u * a.amplitudes(), b.amplitudes()), 1e-12);
}

TEST(two_pair_unitary, random_matched_pairs) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 2 + seed % 5;
    const auto a1 = random_pure(d, derive_seed(seed, 0));
    const auto a2 = random_pure(d, derive_seed(seed, 1));
    // Gram matched by construction: b = W a for a random unitary W.
    const auto w = random_unitary(d, derive_seed(seed, 2));
    const auto b1 = PureState::normalized(w * a1.amplitudes());
    const auto b2 = PureState::normalized(w * a2.amplitudes());
    const auto u = two_pair_unitary(a1, a2, b1, b2);
    ASSERT_LE(unitarity_residual(u), 1e-9);
    ASSERT_LE(distance(u * a1.amplitudes(), b1.amplitudes()), 1e-8);
    ASSERT_LE(distance(u * a2.amplitudes(), b2.amplitudes()), 1e-8);
  }
}

TEST(two_pair_unitary, gram_mismatch_and_dims) {
  const auto e0 = PureState::basis(2, 0), e1 = PureState::basis(2, 1);
  try {
    two_pair_unitary(e0, e1, e0, e0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GramMismatch);
  }
  try {
    two_pair_unitary(e0, e1, PureState::basis(3, 0), PureState::basis(3, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(construct_witness, equal_pure_states) {
  const auto rho = diag({1.0, 0.0});
  const auto w = construct_witness(rho, rho);
  EXPECT_NEAR(w.overlap, 1.0, 1e-12);
  EXPECT_LE(distance(w.psi.amplitudes(), PureState::basis(2, 0).amplitudes()), 1e-12);
  EXPECT_LE(distance(w.phi.amplitudes(), w.psi.amplitudes()), 1e-8);
  EXPECT_TRUE(verify_witness(w, rho, rho, 1e-12).pass);
}

TEST(construct_witness, orthogonal_states) {
  const auto rho = diag({1.0, 0.0}), sigma = diag({0.0, 1.0});
  const auto w = construct_witness(rho, sigma);
  EXPECT_NEAR(w.overlap, 0.0, 1e-12);
  EXPECT_NEAR(pure_overlap(w.psi, w.phi), 0.0, 1e-12);
  const auto rep = verify_witness(w, rho, sigma);
  EXPECT_TRUE(rep.pass);
}

TEST(construct_witness, diagonal_pair) {
  const auto rho = diag({0.5, 0.5}), sigma = diag({1.0, 0.0});
  const auto w = construct_witness(rho, sigma);
  EXPECT_NEAR(w.overlap, kInvSqrt2, 1e-12);
  EXPECT_LE(max_abs_diff(apply(w.channel, w.psi).matrix(), rho.matrix()), 1e-8);
  EXPECT_LE(max_abs_diff(apply(w.channel, w.phi).matrix(), sigma.matrix()), 1e-8);
  EXPECT_LE(w.channel.completeness_residual(), 1e-9);
}

TEST(construct_witness, one_dimensional_short_circuit) {
  const auto one = validate_density(ComplexMatrix::identity(1));
  const auto w = construct_witness(one, one);
  EXPECT_EQ(w.overlap, 1.0);
  EXPECT_TRUE(verify_witness(w, one, one).pass);
}

TEST(construct_witness, random_ensemble) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t d = 2 + seed % 3;
    const auto rho = random_density(d, 1 + seed % d, derive_seed(seed, 0));
    const auto sigma = random_density(d, 1 + (seed / 3) % d, derive_seed(seed, 1));
    const auto w = construct_witness(rho, sigma);
    const auto rep = verify_witness(w, rho, sigma);
    ASSERT_TRUE(rep.pass) << "seed " << seed << " residuals " << rep.psi_residual << " "
                          << rep.phi_residual << " " << rep.overlap_residual;
  }
}

TEST(construct_witness, environment_size_is_immaterial) {
  // The same witness channel, re-dilated with the dimQ^2 environment,
  // is Choi-equal to itself.
  const auto rho = random_density(2, 2, 1), sigma = random_density(2, 1, 2);
  const auto w = construct_witness(rho, sigma);
  const auto big = stinespring_dilate(w.channel);
  EXPECT_EQ(big.dim_e, 4u);
  EXPECT_LE(max_abs_diff(dilation_choi(big), choi(w.channel)), 1e-8);
  EXPECT_LE(max_abs_diff(apply_dilation(big, w.psi).matrix(), rho.matrix()), 1e-8);
}

TEST(verify_witness, detects_perturbed_phi) {
  const auto rho = diag({0.5, 0.5}), sigma = diag({1.0, 0.0});
  auto w = construct_witness(rho, sigma);
  // rotate phi by 1e-3 within the e0/e1 plane
  const double delta = 1e-3;
  const double theta = std::acos(w.overlap) + delta;
  CVector amps(2);
  amps[0] = std::cos(theta);
  amps[1] = std::sin(theta);
  const CorollaryWitness bad{w.psi, PureState::normalized(amps), w.channel, w.overlap,
                             w.fidelity_target};
  const auto rep = verify_witness(bad, rho, sigma);
  EXPECT_FALSE(rep.pass);
  // Oracle: |cos(theta0 + delta) - cos(theta0)| ~ sin(theta0) * delta.
  EXPECT_NEAR(rep.overlap_residual, std::sin(std::acos(w.overlap)) * delta, 1e-6);
}

TEST(overlap_upper_bound_check, identity_and_depolarizing) {
  const auto psi = random_pure(2, 5), phi = random_pure(2, 6);
  EXPECT_NEAR(overlap_upper_bound_check(identity_channel(2), psi, phi), 0.0, 1e-12);
  EXPECT_NEAR(overlap_upper_bound_check(depolarizing(), psi, phi), 1.0 - pure_overlap(psi, phi),
              1e-12);
}

TEST(overlap_upper_bound_check, random_draws) {
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t d = 2 + seed % 3;
    const auto ch = random_channel(d, 1 + seed % (d * d), derive_seed(seed, 0));
    const auto psi = random_pure(d, derive_seed(seed, 1));
    const auto phi = random_pure(d, derive_seed(seed, 2));
    worst = std::min(worst, overlap_upper_bound_check(ch, psi, phi));
  }
  EXPECT_GE(worst, -1e-8);
}

TEST(monotonicity_check, identity_depolarizing_random) {
  const auto rho = random_density(2, 2, 1), sigma = random_density(2, 1, 2);
  EXPECT_NEAR(monotonicity_check(identity_channel(2), rho, sigma), 0.0, 1e-12);
  EXPECT_NEAR(monotonicity_check(depolarizing(), rho, sigma), 1.0 - fidelity(rho, sigma), 1e-10);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 2 + seed % 3;
    const auto g = random_channel(d, 1 + seed % (d * d), derive_seed(seed, 0));
    const auto r = random_density(d, 1 + seed % d, derive_seed(seed, 1));
    const auto s = random_density(d, 1 + (seed / 2) % d, derive_seed(seed, 2));
    ASSERT_GE(monotonicity_check(g, r, s), -1e-8) << "seed " << seed;
  }
  EXPECT_THROW(monotonicity_check(identity_channel(3), rho, sigma), Error);
}

TEST(monotonicity_via_witness, identity_reduces_to_verify) {
  const auto rho = random_density(3, 2, 4), sigma = random_density(3, 3, 5);
  const auto rep = monotonicity_via_witness(identity_channel(3), rho, sigma);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.witness.pass);
  EXPECT_NEAR(rep.direct_residual, 0.0, 1e-12);
}

TEST(monotonicity_via_witness, bit_flip_on_diagonal_pair) {
  const auto rep = monotonicity_via_witness(bit_flip(0.25), diag({0.5, 0.5}), diag({1.0, 0.0}));
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.composed_psi_residual, 1e-8);
  EXPECT_LE(rep.composed_phi_residual, 1e-8);
  EXPECT_GE(rep.bound_residual, -1e-8);
}
