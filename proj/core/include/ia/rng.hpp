#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ia {

/// SplitMix64 finalizer. Used both as a seed mixer and to decorrelate
/// user-facing seeds from raw engine state.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic derivation of a child seed from a parent seed and a stream
/// index. Every (parent, stream) pair maps to a fixed child, so trials,
/// restarts and sub-solves are reproducible independently of each other.
inline std::uint64_t split_seed(std::uint64_t parent, std::uint64_t stream) {
  return mix64(parent ^ mix64(stream + 0x51ed2700u));
}

inline std::uint64_t split_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) {
  return split_seed(split_seed(parent, a), b);
}

/**
 * Seeded Gaussian source built on mt19937_64.
 *
 * The normal variates are produced by an explicit Box-Muller transform on
 * 53-bit uniforms taken straight from the engine, so the byte stream does not
 * depend on the standard library's unspecified std::normal_distribution
 * algorithm.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix64(seed ^ 0xabcdef1234567890ull)) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Standard real Gaussian N(0, 1).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard circularly-symmetric complex Gaussian CN(0, 1):
  /// real and imaginary parts are independent N(0, 1/2).
  std::complex<double> cgaussian() {
    const double s = 0.70710678118654752440;  // 1/sqrt(2)
    double re = gaussian() * s;
    double im = gaussian() * s;
    return {re, im};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ia
