#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "asv/error.hpp"
#include "asv/model.hpp"
#include "asv/omori.hpp"
#include "asv/rng.hpp"

namespace asv {

namespace detail {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Polya-Gamma(1, z) by Devroye's alternating-series method (Polson, Scott and Windle 2013).
inline constexpr double kPgTruncation = 0.64;

// n-th coefficient of the alternating series for J*(1, z), piecewise at the truncation point.
inline double pg_series_coef(int n, double x) {
  const double k = n + 0.5;
  if (x > kPgTruncation) return std::numbers::pi * k * std::exp(-0.5 * k * k * std::numbers::pi * std::numbers::pi * x);
  return std::pow(2.0 / (std::numbers::pi * x), 1.5) * std::numbers::pi * k * std::exp(-2.0 * k * k / x);
}

// P(X < t) for X ~ InverseGaussian(mean = 1/z, shape = 1). z = 0 gives the Levy limit.
inline double pg_inverse_gaussian_cdf(double t, double z) {
  const double root = std::sqrt(1.0 / t);
  const double a = normal_cdf(root * (t * z - 1.0));
  const double b = std::exp(2.0 * z) * normal_cdf(-root * (t * z + 1.0));
  return a + b;
}

// Inverse Gaussian(1/z, 1) truncated to (0, t).
inline double pg_truncated_inverse_gaussian(double z, double t, Rng& rng) {
  z = std::abs(z);
  const double mu = z > 0.0 ? 1.0 / z : std::numeric_limits<double>::infinity();
  double x = t + 1.0;
  if (mu > t) {
    double alpha = 0.0;
    while (uniform(rng) > alpha) {
      double e1 = 0.0, e2 = 0.0;
      do {
        e1 = standard_exponential(rng);
        e2 = standard_exponential(rng);
      } while (e1 * e1 > 2.0 * e2 / t);
      x = 1.0 + e1 * t;
      x = t / (x * x);
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    while (x > t) {
      const double y = standard_normal(rng);
      const double mu_y = mu * y * y;
      const double half_mu = 0.5 * mu;
      x = mu + half_mu * mu_y - half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (uniform(rng) > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

inline double polya_gamma_one(double c, Rng& rng) {
  const double z = 0.5 * std::abs(c);
  const double t = kPgTruncation;
  const double big_k = std::numbers::pi * std::numbers::pi / 8.0 + 0.5 * z * z;
  const double p = std::numbers::pi / (2.0 * big_k) * std::exp(-big_k * t);
  const double q = 2.0 * std::exp(-z) * pg_inverse_gaussian_cdf(t, z);

  for (;;) {
    double x = 0.0;
    if (uniform(rng) < p / (p + q))
      x = t + standard_exponential(rng) / big_k;
    else
      x = pg_truncated_inverse_gaussian(z, t, rng);

    double s = pg_series_coef(0, x);
    const double y = uniform(rng) * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= pg_series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += pg_series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

}  // namespace detail

/// Draw from PG(b, c) for a positive integer b, as a sum of b exact PG(1, c) draws.
inline double sample_polya_gamma(int b, double c, Rng& rng) {
  if (b < 1) throw InvalidArgument("Polya-Gamma shape b must be a positive integer");
  if (!std::isfinite(c)) throw NumericError("Polya-Gamma tilt is not finite");
  double acc = 0.0;
  for (int i = 0; i < b; ++i) acc += detail::polya_gamma_one(c, rng);
  return acc;
}

/// PG(b, c) from its infinite gamma-sum representation truncated at `terms`, plus the expected
/// value of the dropped tail. Approximate; kept as an independent reference sampler.
inline double sample_polya_gamma_truncated(double b, double c, Rng& rng, int terms = 200) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double c2 = c * c / (4.0 * pi2);
  double acc = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double d = (k - 0.5) * (k - 0.5) + c2;
    acc += standard_gamma(b, rng) / d;
  }
  // Tail mean: sum_{k>terms} b / ((k-1/2)^2 + c2) ~ b / terms.
  acc += b / (terms + 0.0);
  return acc / (2.0 * pi2);
}

/// E[PG(b, c)] = b / (2c) tanh(c / 2), with limit b / 4 at c = 0.
inline double polya_gamma_mean(double b, double c) {
  if (std::abs(c) < 1e-8) return b / 4.0;
  return b / (2.0 * c) * std::tanh(0.5 * c);
}

/// Four-parameter Z distribution.
struct ZDistParams {
  double a = 0.5;
  double b = 0.5;
  double mu = 0.0;
  double sigma = 1.0;
};

inline double log_z_density(double x, const ZDistParams& p) {
  const double z = (x - p.mu) / p.sigma;
  const double log_beta = std::lgamma(p.a) + std::lgamma(p.b) - std::lgamma(p.a + p.b);
  // log(1 + e^z) computed stably.
  const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return -std::log(p.sigma) - log_beta + p.a * z - (p.a + p.b) * softplus;
}

inline double z_density(double x, const ZDistParams& p) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !(p.sigma > 0.0)) throw InvalidArgument("Z distribution parameters must be positive");
  return std::exp(log_z_density(x, p));
}

/// Z(a, b, mu, sigma) draw via the logistic transform of a Beta(a, b) variate.
inline double sample_z(const ZDistParams& p, Rng& rng) {
  const double x = standard_gamma(p.a, rng);
  const double y = standard_gamma(p.b, rng);
  return p.mu + p.sigma * (std::log(x) - std::log(y));
}

/// Categorical draw over mixture components with weights p_k N(residual | m_k, w2_k).
/// Returns a 0-based component index.
inline int sample_mixture_indicator(double residual, const std::array<double, 10>& means,
                                    const std::array<double, 10>& vars, const std::array<double, 10>& probs, Rng& rng) {
  if (!std::isfinite(residual)) throw NumericError("mixture indicator: residual is not finite");
  std::array<double, 10> logw{};
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 10; ++i) {
    const double d = residual - means[i];
    logw[i] = std::log(probs[i]) - 0.5 * std::log(vars[i]) - 0.5 * d * d / vars[i];
    top = std::max(top, logw[i]);
  }
  double total = 0.0;
  std::array<double, 10> w{};
  for (std::size_t i = 0; i < 10; ++i) {
    w[i] = std::exp(logw[i] - top);
    total += w[i];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericError("mixture indicator: all weights underflow at residual " + std::to_string(residual));
  double u = uniform(rng) * total;
  for (std::size_t i = 0; i < 10; ++i) {
    u -= w[i];
    if (u <= 0.0) return static_cast<int>(i);
  }
  return 9;
}

inline int sample_mixture_indicator(double residual, const OmoriMixture& mix, Rng& rng) {
  return sample_mixture_indicator(residual, mix.m, mix.w2, mix.p, rng);
}

/// log density of the phi prior, i.e. of (phi + 1) / 2 under the chosen Beta law (up to a constant).
inline double log_phi_prior(double phi, PhiPrior prior) {
  if (!(phi > -1.0 && phi < 1.0)) return -std::numeric_limits<double>::infinity();
  const double x = 0.5 * (phi + 1.0);
  switch (prior) {
    case PhiPrior::Beta10_2: return 9.0 * std::log(x) + std::log1p(-x);
    case PhiPrior::Beta_half_half: return -0.5 * std::log(x) - 0.5 * std::log1p(-x);
  }
  return 0.0;
}

inline constexpr double kPhiSliceWidth = 0.25;
inline constexpr int kMaxSliceShrinks = 1000;

/// One stepping-out and shrinkage slice update on (-1, 1) targeting loglik(phi) + log prior(phi).
inline double slice_sample_phi(double current, const std::function<double(double)>& loglik, PhiPrior prior, Rng& rng) {
  if (!(current > -1.0 && current < 1.0)) throw InvalidArgument("slice_sample_phi: current value outside (-1, 1)");
  auto target = [&](double x) {
    if (!(x > -1.0 && x < 1.0)) return -std::numeric_limits<double>::infinity();
    return loglik(x) + log_phi_prior(x, prior);
  };
  const double f0 = target(current);
  if (!std::isfinite(f0)) throw NumericError("slice_sample_phi: target not finite at current value");
  const double level = f0 - standard_exponential(rng);

  double left = current - kPhiSliceWidth * uniform(rng);
  double right = left + kPhiSliceWidth;
  while (left > -1.0 && target(left) > level) left -= kPhiSliceWidth;
  while (right < 1.0 && target(right) > level) right += kPhiSliceWidth;
  left = std::max(left, -1.0);
  right = std::min(right, 1.0);

  for (int i = 0; i < kMaxSliceShrinks; ++i) {
    const double x = left + uniform(rng) * (right - left);
    if (target(x) > level) return x;
    if (x < current)
      left = x;
    else
      right = x;
  }
  throw NumericError("slice_sample_phi: stuck after " + std::to_string(kMaxSliceShrinks) + " shrinkage steps at phi = " +
                     std::to_string(current) + ", interval (" + std::to_string(left) + ", " + std::to_string(right) + ")");
}

/// Inverse Gaussian with the given mean and shape (Michael, Schucany and Haas).
inline double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
  if (!(mean > 0.0) || !(shape > 0.0)) throw InvalidArgument("inverse Gaussian parameters must be positive");
  const double nu = standard_normal(rng);
  const double y = nu * nu;
  const double x = mean + mean * mean * y / (2.0 * shape) -
                   mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  if (uniform(rng) <= mean / (mean + x)) return x;
  return mean * mean / x;
}

/// Inverse gamma with density proportional to x^{-shape-1} exp(-rate / x).
inline double sample_inverse_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidArgument("inverse gamma parameters must be positive");
  return rate / standard_gamma(shape, rng);
}

/// Gamma with density proportional to x^{shape-1} exp(-rate x).
inline double sample_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidArgument("gamma parameters must be positive");
  return standard_gamma(shape, rng) / rate;
}

}  // namespace asv
