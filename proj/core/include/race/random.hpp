#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace race {

/// Per-caller pseudo-random stream. Never shared between threads.
using RandomStream = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation: folds an ordered list of coordinates
/// (master seed, scheme id, grid point, trial, ...) into one 64-bit seed.
/// The result depends only on the coordinates, never on execution order.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t c : coords) h = splitmix64(h ^ splitmix64(c));
  return h;
}

inline RandomStream make_stream(std::uint64_t seed) { return RandomStream{seed}; }

/// Draws from CN(0, variance): real and imaginary parts each N(0, variance/2).
inline std::complex<double> sample_complex_normal(RandomStream& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace race
