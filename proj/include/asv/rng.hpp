#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace asv {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream id). Chains and replicates each own one.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5a17u};
  return Rng(seq);
}

/// Uniform on the open interval (0, 1).
inline double uniform(Rng& rng) {
  for (;;) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u > 0.0) return u;
  }
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double standard_exponential(Rng& rng) { return -std::log(uniform(rng)); }

/// Gamma with the given shape and unit scale.
inline double standard_gamma(double shape, Rng& rng) {
  return std::gamma_distribution<double>(shape, 1.0)(rng);
}

inline double beta_variate(double a, double b, Rng& rng) {
  const double x = standard_gamma(a, rng);
  const double y = standard_gamma(b, rng);
  return x / (x + y);
}

}  // namespace asv
