#include "fidkit/linalg.hpp"

#include <cmath>
#include <numeric>

#include "fidkit/states.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace fidkit;
using fidkit::testing::max_abs_diff;
using fidkit::testing::random_hermitian;
using fidkit::testing::random_matrix;
using fidkit::testing::rebuild;

TEST(herm_eig, diagonal_input) {
  const auto r = herm_eig(ComplexMatrix::diagonal({3.0, 1.0, 2.0}));
  EXPECT_EQ(r.eigenvalues, (RVector{1.0, 2.0, 3.0}));
  // columns are the permuted identity: e1, e2, e0
  ComplexMatrix expected(3, 3);
  expected(1, 0) = 1.0;
  expected(2, 1) = 1.0;
  expected(0, 2) = 1.0;
  EXPECT_EQ(max_abs_diff(r.eigenvectors, expected), 0.0);
}

TEST(herm_eig, pauli_x) {
  const auto r = herm_eig(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}});
  EXPECT_NEAR(r.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], 1.0, 1e-15);
}

TEST(herm_eig, pauli_y_complex_pivot) {
  const cplx i{0.0, 1.0};
  const ComplexMatrix y{{0.0, -i}, {i, 0.0}};
  const auto r = herm_eig(y);
  EXPECT_NEAR(r.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], 1.0, 1e-15);
  EXPECT_LT(max_abs_diff(rebuild(r), y), 1e-14);
}

TEST(herm_eig, random_reconstruction) {
  const auto m = random_hermitian(5, 11);
  const auto r = herm_eig(m);
  EXPECT_LE(max_abs_diff(rebuild(r), m), 1e-10);
  EXPECT_LE(unitarity_residual(r.eigenvectors), 1e-12);
  for (std::size_t k = 1; k < r.eigenvalues.size(); ++k)
    EXPECT_LE(r.eigenvalues[k - 1], r.eigenvalues[k]);
}

TEST(herm_eig, rejects_non_hermitian) {
  const ComplexMatrix m{{1.0, 2.0}, {0.0, 1.0}};
  try {
    herm_eig(m);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(herm_eig, property_sweep) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const auto m = random_hermitian(n, 1000 + seed);
    const auto r = herm_eig(m);
    const double scale = std::max(1.0, m.frobenius_norm());
    ASSERT_LE((rebuild(r) - m).frobenius_norm(), 10 * 1e-10 * scale) << "seed " << seed;
    ASSERT_LE(unitarity_residual(r.eigenvectors), 1e-9);
  }
}

TEST(psd_sqrt, identity_and_diagonal) {
  EXPECT_EQ(max_abs_diff(psd_sqrt(ComplexMatrix::identity(3)), ComplexMatrix::identity(3)), 0.0);
  EXPECT_LT(max_abs_diff(psd_sqrt(ComplexMatrix::diagonal({4.0, 9.0})),
                         ComplexMatrix::diagonal({2.0, 3.0})),
            1e-15);
}

TEST(psd_sqrt, rank_two_square_reproduces) {
  const auto g = random_matrix(4, 2, 7);
  const auto m = g * g.adjoint();
  const auto r = psd_sqrt(m);
  EXPECT_LE(max_abs_diff(r * r, m), 1e-10);
  EXPECT_EQ(max_abs_diff(r, r.adjoint()), 0.0);
  for (double l : herm_eig(r).eigenvalues) EXPECT_GE(l, -1e-14);
}

TEST(psd_sqrt, rejects_negative_and_clips_roundoff) {
  EXPECT_THROW(psd_sqrt(ComplexMatrix::diagonal({1.0, -0.01})), Error);
  const auto r = psd_sqrt(ComplexMatrix::diagonal({1.0, -1e-13}));
  EXPECT_EQ(r(1, 1), cplx(0.0));
}

TEST(psd_sqrt, property_sweep) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const std::size_t rank = 1 + seed % n;
    const auto g = random_matrix(n, rank, 5000 + seed);
    const auto m = g * g.adjoint();
    const auto r = psd_sqrt(m);
    ASSERT_LE((r * r - m).frobenius_norm(), 10 * 1e-10 * std::max(1.0, m.frobenius_norm()));
  }
}

TEST(svd, diagonal_and_rank_one) {
  const auto d = svd(ComplexMatrix::diagonal({2.0, 1.0}));
  EXPECT_NEAR(d.s[0], 2.0, 1e-15);
  EXPECT_NEAR(d.s[1], 1.0, 1e-15);

  const auto a = random_pure(3, 1).amplitudes();
  const auto b = random_pure(3, 2).amplitudes();
  const auto r = svd(ComplexMatrix::outer(a, b));
  EXPECT_NEAR(r.s[0], 1.0, 1e-14);
  EXPECT_NEAR(r.s[1], 0.0, 1e-14);
  EXPECT_NEAR(r.s[2], 0.0, 1e-14);
  EXPECT_LE(unitarity_residual(r.u), 1e-12);
}

TEST(svd, random_against_gram_spectrum) {
  const auto m = random_matrix(3, 3, 99);
  const auto r = svd(m);
  EXPECT_LE(max_abs_diff(rebuild(r), m), 1e-10);
  // Oracle: singular values are square roots of the eigenvalues of M^dagger M.
  const auto gram = herm_eig(m.adjoint() * m);
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_NEAR(r.s[k], std::sqrt(gram.eigenvalues[2 - k]), 1e-10);
}

TEST(svd, property_sweep) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t rows = 2 + seed % 5;
    const std::size_t cols = 2 + (seed / 5) % 5;
    const std::size_t rank = 1 + seed % std::min(rows, cols);
    const auto m = random_matrix(rows, rank, 9000 + seed) * random_matrix(rank, cols, 19000 + seed);
    const auto r = svd(m);
    ASSERT_LE((rebuild(r) - m).frobenius_norm(), 1e-9 * std::max(1.0, m.frobenius_norm()));
    ASSERT_LE(unitarity_residual(r.u), 1e-9) << "seed " << seed;
    ASSERT_LE(unitarity_residual(r.v), 1e-9) << "seed " << seed;
    for (std::size_t k = 1; k < r.s.size(); ++k) ASSERT_LE(r.s[k], r.s[k - 1]);
    for (double s : r.s) ASSERT_GE(s, 0.0);
  }
}

TEST(svd, zero_matrix) {
  const auto r = svd(ComplexMatrix(3, 3));
  for (double s : r.s) EXPECT_EQ(s, 0.0);
  EXPECT_LE(unitarity_residual(r.u), 1e-15);
}

TEST(polar_unitary, psd_and_unitary_inputs) {
  const auto g = random_matrix(3, 3, 4);
  const auto p = g * g.adjoint() + ComplexMatrix::identity(3);
  EXPECT_LE(max_abs_diff(polar_unitary(p), ComplexMatrix::identity(3)), 1e-12);
  const auto u = random_unitary(3, 5);
  EXPECT_LE(max_abs_diff(polar_unitary(u), u), 1e-12);
}

TEST(polar_unitary, attains_trace_norm) {
  const auto m = random_matrix(3, 3, 6);
  const auto w = polar_unitary(m);
  EXPECT_LE(unitarity_residual(w), 1e-9);
  const auto s = svd(m).s;
  const double sum = std::accumulate(s.begin(), s.end(), 0.0);
  const cplx t = (w.adjoint() * m).trace();
  EXPECT_NEAR(t.real(), sum, 1e-10);
  EXPECT_NEAR(t.imag(), 0.0, 1e-10);
  const auto wm = w.adjoint() * m;
  EXPECT_LE(max_abs_diff(wm, wm.adjoint()), 1e-8);
  for (double l : herm_eig(hermitian_part(wm)).eigenvalues) EXPECT_GE(l, -1e-8);
}

TEST(polar_unitary, property_sweep) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const std::size_t rank = 1 + seed % n;
    const auto m = random_matrix(n, rank, 300 + seed) * random_matrix(rank, n, 700 + seed);
    ASSERT_LE(unitarity_residual(polar_unitary(m)), 1e-9) << "seed " << seed;
  }
}

TEST(trace_norm, examples) {
  EXPECT_NEAR(trace_norm(ComplexMatrix::diagonal({1.0, -2.0})), 3.0, 1e-14);
  EXPECT_NEAR(trace_norm(random_unitary(4, 8)), 4.0, 1e-12);
  const auto m = random_matrix(4, 4, 12);
  const auto s = svd(m).s;
  EXPECT_NEAR(trace_norm(m), std::accumulate(s.begin(), s.end(), 0.0), 1e-10);
}

TEST(trace_norm, unitary_invariance) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const auto m = random_matrix(n, n, seed);
    const auto u = random_unitary(n, 100 + seed);
    const auto v = random_unitary(n, 200 + seed);
    ASSERT_NEAR(trace_norm(u * m * v), trace_norm(m), 1e-9);
  }
}

TEST(kron, identity_and_shape) {
  EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3)),
            ComplexMatrix::identity(6));
  const auto k = kron(random_matrix(2, 3, 1), random_matrix(4, 5, 2));
  EXPECT_EQ(k.rows(), 8u);
  EXPECT_EQ(k.cols(), 15u);
}

TEST(kron, mixed_product) {
  const auto a = random_matrix(2, 2, 1), b = random_matrix(3, 3, 2);
  const auto c = random_matrix(2, 2, 3), d = random_matrix(3, 3, 4);
  EXPECT_LE(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)), 1e-10);
}

TEST(kron, entry_layout_is_environment_first) {
  const auto a = random_matrix(2, 2, 5), b = random_matrix(3, 3, 6);
  const auto k = kron(a, b);
  for (std::size_t e = 0; e < 2; ++e)
    for (std::size_t f = 0; f < 2; ++f)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          ASSERT_EQ(k(e * 3 + i, f * 3 + j), a(e, f) * b(i, j));
}

TEST(partial_trace_env, product_and_bell) {
  const auto m = random_matrix(3, 3, 10);
  ComplexMatrix zero_proj(2, 2);
  zero_proj(0, 0) = 1.0;
  EXPECT_EQ(max_abs_diff(partial_trace_env(kron(zero_proj, m), 2, 3), m), 0.0);

  const double h = 1.0 / std::sqrt(2.0);
  const CVector bell{h, 0.0, 0.0, h};
  const auto out = partial_trace_env(ComplexMatrix::outer(bell, bell), 2, 2);
  // Oracle: explicit index sum, rho(i,j) = sum_e bell[2e+i] conj(bell[2e+j]).
  ComplexMatrix expected(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t e = 0; e < 2; ++e) expected(i, j) += bell[2 * e + i] * std::conj(bell[2 * e + j]);
  EXPECT_LE(max_abs_diff(out, expected), 1e-15);
  EXPECT_NEAR(out(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(out(0, 1)), 0.0, 1e-15);
}

TEST(partial_trace_env, properties) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t de = 1 + seed % 4, dq = 2 + seed % 3;
    const auto a = random_matrix(de, de, seed);
    const auto b = random_matrix(dq, dq, seed + 500);
    ASSERT_LE(max_abs_diff(partial_trace_env(kron(a, b), de, dq), a.trace() * b), 1e-12);
    const auto m = random_matrix(de * dq, de * dq, seed + 900);
    ASSERT_LE(std::abs(partial_trace_env(m, de, dq).trace() - m.trace()), 1e-12);
  }
}

TEST(partial_trace_env, dimension_mismatch) {
  try {
    partial_trace_env(ComplexMatrix(5, 5), 2, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(solve, recovers_solution) {
  const auto a = random_matrix(4, 4, 21);
  const auto x = random_matrix(4, 2, 22);
  EXPECT_LE(max_abs_diff(solve(a, a * x), x), 1e-10);
}

TEST(complete_basis, extends_to_unitary) {
  const auto u = random_unitary(5, 3);
  std::vector<CVector> fam{u.column(0), u.column(1)};
  const auto full = complete_basis(fam, 5);
  EXPECT_LE(unitarity_residual(ComplexMatrix::from_columns(full)), 1e-12);
  EXPECT_EQ(full[0], fam[0]);
}
