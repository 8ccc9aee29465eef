#pragma once

// Seeded randomness. The engine is std::mt19937_64, whose output sequence is
// fixed by the C++ standard; Gaussians come from our own Box-Muller transform
// (std::normal_distribution is implementation-defined), so every ensemble is
// bit-reproducible across platforms and standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "fidkit/matrix.hpp"

namespace fidkit {

// SplitMix64 finalizer; used to decorrelate user seeds and derive substreams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent child seed for stream `index` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard complex Gaussian, E|z|^2 = 1.
  cplx complex_gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return cplx(r * std::cos(angle), r * std::sin(angle)) * (1.0 / std::numbers::sqrt2);
  }

  ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols) {
    ComplexMatrix g(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) g(i, j) = complex_gaussian();
    return g;
  }

  CVector gaussian_vector(std::size_t n) {
    CVector v(n);
    for (auto& z : v) z = complex_gaussian();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fidkit
