#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "asv/error.hpp"
#include "asv/rng.hpp"

namespace asv::sim {

struct DGPSpec {
  int id = 1;  // 1..8
  std::size_t length = 1000;
  std::uint64_t seed = 1;
};

/// Observations with their ground-truth volatility sigma_t (> 0) and optional regime path.
struct SimPath {
  std::vector<double> y;
  std::vector<double> sigma_true;
  std::vector<int> regime;  // empty for single-regime processes
};

inline constexpr double kStayProbability = 0.98;

/// Regime transition for a chain that stays with probability 0.98 and otherwise moves uniformly
/// to one of the other states.
inline int next_regime(int current, int states, Rng& rng) {
  const double u = uniform(rng);
  if (u < kStayProbability) return current;
  const double step = (1.0 - kStayProbability) / static_cast<double>(states - 1);
  int pick = static_cast<int>((u - kStayProbability) / step);
  pick = std::min(pick, states - 2);
  return pick >= current ? pick + 1 : pick;
}

namespace detail {

// h_t = m_{s_t} + 0.8 (h_{t-1} - m_{s_{t-1}}) + 0.2 u_t; h_0 = m_{s_0}, s_0 uniform.
template <std::size_t N>
SimPath regime_sv(const std::array<double, N>& means, std::size_t length, Rng& rng) {
  SimPath p;
  p.y.resize(length);
  p.sigma_true.resize(length);
  if (N > 1) p.regime.resize(length);
  const int states = static_cast<int>(N);
  int s_prev = N > 1 ? static_cast<int>(uniform(rng) * states) : 0;
  s_prev = std::min(s_prev, states - 1);
  double h_prev = means[static_cast<std::size_t>(s_prev)];
  for (std::size_t t = 0; t < length; ++t) {
    const int s = N > 1 ? next_regime(s_prev, states, rng) : 0;
    const double h = means[static_cast<std::size_t>(s)] + 0.8 * (h_prev - means[static_cast<std::size_t>(s_prev)]) +
                     0.2 * standard_normal(rng);
    p.sigma_true[t] = std::exp(0.5 * h);
    p.y[t] = p.sigma_true[t] * standard_normal(rng);
    if (N > 1) p.regime[t] = s;
    h_prev = h;
    s_prev = s;
  }
  return p;
}

// sigma2_t = m_{s_t} + alpha y_{t-1}^2 + beta_{s_t} sigma2_{t-1}; starts at the active regime's
// unconditional variance with y_0^2 set to that value.
template <std::size_t N>
SimPath regime_garch(const std::array<double, N>& omega, const std::array<double, N>& beta, double alpha, std::size_t length,
                     Rng& rng) {
  SimPath p;
  p.y.resize(length);
  p.sigma_true.resize(length);
  if (N > 1) p.regime.resize(length);
  const int states = static_cast<int>(N);
  int s = N > 1 ? std::min(static_cast<int>(uniform(rng) * states), states - 1) : 0;
  const auto su = static_cast<std::size_t>(s);
  double sigma2_prev = omega[su] / (1.0 - alpha - beta[su]);
  double y2_prev = sigma2_prev;
  for (std::size_t t = 0; t < length; ++t) {
    if (N > 1) s = next_regime(s, states, rng);
    const auto st = static_cast<std::size_t>(s);
    const double sigma2 = omega[st] + alpha * y2_prev + beta[st] * sigma2_prev;
    p.sigma_true[t] = std::sqrt(sigma2);
    p.y[t] = p.sigma_true[t] * standard_normal(rng);
    if (N > 1) p.regime[t] = s;
    y2_prev = p.y[t] * p.y[t];
    sigma2_prev = sigma2;
  }
  return p;
}

}  // namespace detail

/// h_t = A sin(10 (2 pi t) / T) + B cos(10 (2 pi t) / T) + C sin(3 (2 pi t) / T) + D cos(3 (2 pi t) / T),
/// A..D ~ U(0, 5), t = 1..T.
inline SimPath sinusoid_sv(std::size_t length, Rng& rng) {
  std::array<double, 4> c{};
  for (auto& x : c) x = 5.0 * uniform(rng);
  SimPath p;
  p.y.resize(length);
  p.sigma_true.resize(length);
  const double n = static_cast<double>(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i + 1);
    const double w10 = 10.0 * 2.0 * std::numbers::pi * t / n;
    const double w3 = 3.0 * 2.0 * std::numbers::pi * t / n;
    const double h = c[0] * std::sin(w10) + c[1] * std::cos(w10) + c[2] * std::sin(w3) + c[3] * std::cos(w3);
    p.sigma_true[i] = std::exp(0.5 * h);
    p.y[i] = p.sigma_true[i] * standard_normal(rng);
  }
  return p;
}

inline constexpr std::size_t kPiecewiseBlock = 25;

/// Block index j = floor(t / 25) + 1 for t = 1..T, h_t = (-1)^j |z_j| with z_j ~ N(5, 0.5^2)
/// for even j and N(0, 0.5^2) for odd j. `regime` holds j.
inline SimPath piecewise_constant_sv(std::size_t length, Rng& rng) {
  SimPath p;
  p.y.resize(length);
  p.sigma_true.resize(length);
  p.regime.resize(length);
  int block = -1;
  double level = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    const int j = static_cast<int>((i + 1) / kPiecewiseBlock) + 1;
    if (j != block) {
      block = j;
      const double z = (j % 2 == 0 ? 5.0 : 0.0) + 0.5 * standard_normal(rng);
      level = (j % 2 == 0 ? 1.0 : -1.0) * std::abs(z);
    }
    p.sigma_true[i] = std::exp(0.5 * level);
    p.y[i] = p.sigma_true[i] * standard_normal(rng);
    p.regime[i] = j;
  }
  return p;
}

inline SimPath generate(const DGPSpec& spec, Rng& rng) {
  if (spec.length < 1) throw InvalidArgument("simulated path needs positive length");
  switch (spec.id) {
    case 1: return detail::regime_sv(std::array<double, 1>{3.0}, spec.length, rng);
    case 2: return detail::regime_sv(std::array<double, 2>{-10.0, 6.0}, spec.length, rng);
    case 3: return detail::regime_sv(std::array<double, 3>{-10.0, -3.0, 3.0}, spec.length, rng);
    case 4: return detail::regime_garch(std::array<double, 1>{1.0}, std::array<double, 1>{0.5}, 0.1, spec.length, rng);
    case 5:
      return detail::regime_garch(std::array<double, 2>{8.0, 0.1}, std::array<double, 2>{0.8, 0.3}, 0.15, spec.length, rng);
    case 6:
      return detail::regime_garch(std::array<double, 3>{12.0, 8.0, 0.1}, std::array<double, 3>{0.8, 0.5, 0.2}, 0.15,
                                  spec.length, rng);
    case 7: return sinusoid_sv(spec.length, rng);
    case 8: return piecewise_constant_sv(spec.length, rng);
    default: throw InvalidArgument("DGP id must be in 1..8, got " + std::to_string(spec.id));
  }
}

/// Deterministic in (seed, path id).
inline SimPath generate(const DGPSpec& spec, std::uint64_t path_id = 0) {
  Rng rng = make_rng(spec.seed, path_id);
  return generate(spec, rng);
}

}  // namespace asv::sim
