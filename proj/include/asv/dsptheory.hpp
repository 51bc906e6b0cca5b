#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "asv/dist.hpp"
#include "asv/error.hpp"
#include "asv/rng.hpp"

namespace asv::dsp {

/// AR parameters of a dynamic shrinkage process with Z(1/2, 1/2, 0, 1) innovations.
struct DSPStationary {
  double phi = 0.5;
  double mu = 0.0;

  void validate() const {
    if (!(std::abs(phi) < 1.0))
      throw InvalidArgument("dynamic shrinkage process diverges for |phi| >= 1 (phi = " + std::to_string(phi) + ")");
  }
};

/// Adaptive Gauss-Kronrod on [a, b]; infinite endpoints are mapped to finite ones internally.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

/// Tanh-sinh on a finite [a, b]; tolerates integrable endpoint singularities such as the
/// kappa densities at 0 and 1. The integrand is never evaluated at the endpoints.
template <class F>
double integrate_singular(F&& f, double a, double b, double tol = 1e-10) {
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate([&f](double x) { return f(x); }, a, b, tol);
}

inline double sech(double x) { return 1.0 / std::cosh(x); }

/// Stationary variance pi^2 / (1 - phi^2) of v - mu.
inline double stationary_variance(double phi) {
  DSPStationary{phi, 0.0}.validate();
  return std::numbers::pi * std::numbers::pi / (1.0 - phi * phi);
}

// Closed forms below are for the stationary law at phi = 1/2, mu = 0, where v ~ Logistic(0, 2).

inline double stationary_density_v(double v) {
  const double s = sech(0.25 * v);
  return 0.125 * s * s;
}

inline double stationary_cdf_v(double v) { return 1.0 / (1.0 + std::exp(-0.5 * v)); }

/// Density of lambda = exp(v / 2).
inline double stationary_density_lambda(double lambda) {
  if (!(lambda > 0.0)) return 0.0;
  return 1.0 / ((1.0 + lambda) * (1.0 + lambda));
}

/// Density of kappa = 1 / (1 + exp(v)).
inline double stationary_density_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) return 0.0;
  const double r = std::sqrt((1.0 - kappa) / kappa);
  return 1.0 / std::sqrt(kappa * (1.0 - kappa)) / (2.0 * kappa * (1.0 + r) * (1.0 + r));
}

/// Half-Cauchy density of lambda under the horseshoe.
inline double horseshoe_density_lambda(double lambda) {
  if (!(lambda > 0.0)) return 0.0;
  return 2.0 / (std::numbers::pi * (1.0 + lambda * lambda));
}

/// Beta(1/2, 1/2) density of kappa under the horseshoe.
inline double horseshoe_density_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) return 0.0;
  return 1.0 / (std::numbers::pi * std::sqrt(kappa * (1.0 - kappa)));
}

/// Roots of f(lambda) = g(lambda): (2 -+ sqrt((4 - pi) pi)) / (pi - 2).
/// The stationary density exceeds the horseshoe outside this pair and falls below it between.
inline std::pair<double, double> crossing_points() {
  const double pi = std::numbers::pi;
  const double root = std::sqrt((4.0 - pi) * pi);
  return {(2.0 - root) / (pi - 2.0), (2.0 + root) / (pi - 2.0)};
}

/// K_U = 1 / (2 sqrt(2 pi)) and K_L = 1 / (8 sqrt(2 pi)).
inline constexpr double kBoundUpperConstant = std::numbers::inv_sqrtpi / (2.0 * std::numbers::sqrt2);
inline constexpr double kBoundLowerConstant = std::numbers::inv_sqrtpi / (8.0 * std::numbers::sqrt2);

struct MarginalBounds {
  double lower;
  double upper;
};

/// Bounds on the marginal density of a k-th difference with variance lambda^2, lambda ~ f(lambda):
/// K_L log(1 + 4 / dh^2) < f(dh) < K_U log(1 + 2 / dh^2).
inline MarginalBounds marginal_bounds_delta_h(double dh) {
  if (dh == 0.0) throw InvalidArgument("marginal density of the increment is unbounded at zero");
  const double x = dh * dh;
  return {kBoundLowerConstant * std::log1p(4.0 / x), kBoundUpperConstant * std::log1p(2.0 / x)};
}

/// Marginal density of dh by quadrature over lambda: int N(dh | 0, lambda^2) / (1 + lambda)^2 dlambda.
inline double marginal_density_delta_h(double dh) {
  if (dh == 0.0) return std::numeric_limits<double>::infinity();
  const double a = std::abs(dh);
  auto integrand = [dh](double lambda) {
    if (!(lambda > 0.0)) return 0.0;
    const double z = dh / lambda;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * lambda) * stationary_density_lambda(lambda);
  };
  return integrate(integrand, 0.0, a) + integrate(integrand, a, std::numeric_limits<double>::infinity());
}

/// Forward simulation of v_t = mu + phi (v_{t-1} - mu) + eta_t, eta_t ~ Z(1/2, 1/2, 0, 1).
/// Starts at v_0 = mu and discards the first `burn` steps.
inline std::vector<double> forward_simulate_dsp(const DSPStationary& params, std::size_t length, Rng& rng, std::size_t burn = 0) {
  params.validate();
  const ZDistParams z{0.5, 0.5, 0.0, 1.0};
  std::vector<double> v(length);
  double prev = params.mu;
  for (std::size_t t = 0; t < burn + length; ++t) {
    prev = params.mu + params.phi * (prev - params.mu) + sample_z(z, rng);
    if (t >= burn) v[t - burn] = prev;
  }
  return v;
}

/// prod_{h=0}^{terms-1} sec(pi phi^h t), the moment generating function truncated at `terms`.
inline double mgf_partial_product(double phi, double t, int terms) {
  double prod = 1.0;
  double scale = 1.0;
  for (int h = 0; h < terms; ++h) {
    prod /= std::cos(std::numbers::pi * scale * t);
    scale *= phi;
  }
  return prod;
}

/// prod_{h=0}^{terms-1} sech(pi phi^h t), the characteristic function truncated at `terms`.
inline double cf_partial_product(double phi, double t, int terms) {
  double prod = 1.0;
  double scale = 1.0;
  for (int h = 0; h < terms; ++h) {
    prod *= sech(std::numbers::pi * scale * t);
    scale *= phi;
  }
  return prod;
}

}  // namespace asv::dsp
