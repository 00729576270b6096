#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ambc {

using RandomStream = std::mt19937_64;

/// Independent sub-stream keyed by (master seed, counter, purpose tag).
/// Streams depend only on the key, never on which worker or in which order
/// they are created.
inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t counter,
                                  std::uint64_t tag = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                    static_cast<std::uint32_t>(tag),     static_cast<std::uint32_t>(tag >> 32)};
  return RandomStream(seq);
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
template <class Urbg>
std::complex<double> complex_normal(Urbg& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace ambc
