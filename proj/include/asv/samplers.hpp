#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "asv/difference.hpp"
#include "asv/dist.hpp"
#include "asv/linalg.hpp"
#include "asv/model.hpp"
#include "asv/omori.hpp"
#include "asv/rng.hpp"

namespace asv {

/// Log evolution variances of one latent path together with their dynamic-shrinkage augmentation.
///
/// Innovation convention: v_1 = mu + eta_1 and v_t = mu + phi (v_{t-1} - mu) + eta_t for t >= 2,
/// with eta_t | xi_t ~ N((a - b) / (2 xi_t), 1 / xi_t). xi_t is always the precision of eta_t.
struct DspState {
  std::vector<double> v;
  std::vector<int> s;  // 0-based mixture components for log squared increments
  std::vector<double> xi;
  double mu = 0.0;
  double phi = 0.0;
  double xi_mu = 1.0;
  std::size_t phi_dropped_terms = 0;  // pseudo-likelihood terms skipped in the last phi update
};

struct ChainState {
  std::vector<double> h;       // log-variance of y
  std::vector<double> h_star;  // smooth component (nugget variants)
  std::vector<int> j;          // 0-based mixture components for y*
  DspState vol;                // v holds log evolution variances of the h prior for every variant
  double sigma2_c = 0.1;       // nugget variance
  double sigma2_h = 1.0;       // RWSV
  std::vector<double> sigma2_t_bl;  // RWSV-BL local variances of the proper increments
  double lambda2_bl = 1.0;
  std::vector<double> beta;    // BTF-ASV mean path
  DspState mean_dsp;           // BTF-ASV evolution variances of beta
};

/// Settings shared by every DSP block update.
struct DspConfig {
  int k = 1;
  double a = 0.5;
  double b = 0.5;
  double offset_c = 1e-8;
  bool fix_phi = false;
  PhiPrior phi_prior = PhiPrior::Beta10_2;
  MuUpdate mu_update = MuUpdate::Displayed;

  int pg_shape() const { return static_cast<int>(std::lround(a + b)); }
  double eta_shift_numerator() const { return 0.5 * (a - b); }
};

inline DspConfig dsp_config(const ModelSpec& spec, int k) {
  DspConfig cfg;
  cfg.k = k;
  cfg.a = spec.a;
  cfg.b = spec.b;
  cfg.offset_c = spec.offset_c;
  cfg.fix_phi = fixes_phi(spec.variant);
  cfg.phi_prior = spec.phi_prior;
  cfg.mu_update = spec.mu_update;
  return cfg;
}

/// Prior variance of the initial level(s) in the random-walk variants.
inline constexpr double kDiffuseInitialVariance = 1e4;

/// Nugget variance prior IG(shape, rate).
inline constexpr double kNuggetPriorShape = 2.0;
inline constexpr double kNuggetPriorRate = 0.1;

/// RWSV evolution variance prior IG(shape, rate).
inline constexpr double kRwsvPriorShape = 0.01;
inline constexpr double kRwsvPriorRate = 0.01;

/// Bayesian-LASSO Gamma(r, delta) prior on Lambda^2.
inline constexpr double kLassoPriorShape = 1.0;
inline constexpr double kLassoPriorRate = 1.0;

/// Pseudo-likelihood terms with |v_{t-1} - mu| below this are dropped from the phi update.
inline constexpr double kPhiDenominatorFloor = 1e-8;

inline std::vector<double> log_square(std::span<const double> x, double offset) {
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = std::log(x[t] * x[t] + offset);
  return out;
}

/// log((extended k-th differences)^2 + offset); the first k entries use the levels themselves.
inline std::vector<double> omega_star(std::span<const double> path, int k, double offset) {
  return log_square(DifferenceOperator(path.size(), k).apply_extended(path), offset);
}

// ---------------------------------------------------------------------------------------------
// Mixture indicators

/// Draws each indicator independently given its residual (observation minus latent level).
inline void update_indicators(std::vector<int>& out, std::span<const double> observed, std::span<const double> level,
                              const OmoriMixture& mix, Rng& rng) {
  out.resize(observed.size());
  for (std::size_t t = 0; t < observed.size(); ++t) out[t] = sample_mixture_indicator(observed[t] - level[t], mix, rng);
}

inline void update_j(ChainState& st, std::span<const double> y_star, const OmoriMixture& mix, Rng& rng) {
  update_indicators(st.j, y_star, st.h, mix, rng);
}

// ---------------------------------------------------------------------------------------------
// Log-variance path

/// h | j, v, y*: precision Q_v + diag(1 / w2_j), linear (y* - m_j) / w2_j.
inline GaussianCanonical h_conditional(std::span<const double> v, std::span<const int> j, std::span<const double> y_star,
                                       int k, const OmoriMixture& mix) {
  GaussianCanonical g{build_Qv(v, k), std::vector<double>(y_star.size())};
  auto diag = g.precision.band(0);
  for (std::size_t t = 0; t < y_star.size(); ++t) {
    const double w2 = mix.w2[j[t]];
    diag[t] += 1.0 / w2;
    g.linear[t] = (y_star[t] - mix.m[j[t]]) / w2;
  }
  return g;
}

/// h* | j, v, sigma2_c, y* with h integrated out: y*_t ~ N(h*_t + m_j, w2_j + sigma2_c).
inline GaussianCanonical h_star_collapsed_conditional(std::span<const double> v, std::span<const int> j,
                                                      std::span<const double> y_star, double sigma2_c, int k,
                                                      const OmoriMixture& mix) {
  GaussianCanonical g{build_Qv(v, k), std::vector<double>(y_star.size())};
  auto diag = g.precision.band(0);
  for (std::size_t t = 0; t < y_star.size(); ++t) {
    const double var = mix.w2[j[t]] + sigma2_c;
    diag[t] += 1.0 / var;
    g.linear[t] = (y_star[t] - mix.m[j[t]]) / var;
  }
  return g;
}

/// h* | h, v, sigma2_c: precision Q_v + I / sigma2_c, linear h / sigma2_c.
inline GaussianCanonical h_star_conditional(std::span<const double> v, std::span<const double> h, double sigma2_c, int k) {
  GaussianCanonical g{build_Qv(v, k), std::vector<double>(h.size())};
  g.precision.add_diagonal(1.0 / sigma2_c);
  for (std::size_t t = 0; t < h.size(); ++t) g.linear[t] = h[t] / sigma2_c;
  return g;
}

/// Draws h. Nugget variants draw (h*, h) jointly: h* from its collapsed conditional, then each
/// h_t | h*_t, y*_t from the product of two Gaussians.
inline void update_h(ChainState& st, std::span<const double> y_star, int k, bool nugget, const OmoriMixture& mix, Rng& rng) {
  if (!nugget) {
    st.h = h_conditional(st.vol.v, st.j, y_star, k, mix).draw(rng);
    return;
  }
  st.h_star = h_star_collapsed_conditional(st.vol.v, st.j, y_star, st.sigma2_c, k, mix).draw(rng);
  st.h.resize(y_star.size());
  for (std::size_t t = 0; t < y_star.size(); ++t) {
    const double w2 = mix.w2[st.j[t]];
    const double prec = 1.0 / w2 + 1.0 / st.sigma2_c;
    const double lin = (y_star[t] - mix.m[st.j[t]]) / w2 + st.h_star[t] / st.sigma2_c;
    st.h[t] = lin / prec + standard_normal(rng) / std::sqrt(prec);
  }
}

/// sigma2_c | h, h* (conjugate inverse gamma), then h* | h, v, sigma2_c.
inline void update_nugget(ChainState& st, int k, Rng& rng) {
  double ss = 0.0;
  for (std::size_t t = 0; t < st.h.size(); ++t) ss += (st.h[t] - st.h_star[t]) * (st.h[t] - st.h_star[t]);
  st.sigma2_c = sample_inverse_gamma(kNuggetPriorShape + 0.5 * static_cast<double>(st.h.size()), kNuggetPriorRate + 0.5 * ss, rng);
  st.h_star = h_star_conditional(st.vol.v, st.h, st.sigma2_c, k).draw(rng);
}

// ---------------------------------------------------------------------------------------------
// Dynamic shrinkage process blocks

inline void update_s(DspState& d, std::span<const double> omega, const OmoriMixture& mix, Rng& rng) {
  update_indicators(d.s, omega, d.v, mix, rng);
}

/// v | omega*, s, xi, mu, phi: precision Q_{xi,phi} + diag(1 / w2_s),
/// linear (omega* - m_s) / w2_s + Q_{xi,phi} 1 mu + A' (a - b) / 2.
inline GaussianCanonical v_conditional(const DspState& d, std::span<const double> omega, const DspConfig& cfg,
                                       const OmoriMixture& mix) {
  const std::size_t n = omega.size();
  GaussianCanonical g{build_Qxi(d.xi, d.phi), std::vector<double>(n)};
  const std::vector<double> ones(n, 1.0);
  const std::vector<double> prior_lin = g.precision.multiply(ones);
  const double shift = cfg.eta_shift_numerator();
  auto diag = g.precision.band(0);
  for (std::size_t t = 0; t < n; ++t) {
    const double w2 = mix.w2[d.s[t]];
    diag[t] += 1.0 / w2;
    g.linear[t] = (omega[t] - mix.m[d.s[t]]) / w2 + prior_lin[t] * d.mu;
    if (shift != 0.0) g.linear[t] += shift * (1.0 - (t + 1 < n ? d.phi : 0.0));
  }
  return g;
}

inline void update_v(DspState& d, std::span<const double> omega, const DspConfig& cfg, const OmoriMixture& mix, Rng& rng) {
  d.v = v_conditional(d, omega, cfg, mix).draw(rng);
}

/// Innovations eta_t implied by (v, mu, phi).
inline std::vector<double> dsp_innovations(const DspState& d) {
  std::vector<double> eta(d.v.size());
  if (eta.empty()) return eta;
  eta[0] = d.v[0] - d.mu;
  for (std::size_t t = 1; t < d.v.size(); ++t) eta[t] = d.v[t] - d.phi * d.v[t - 1] - d.mu * (1.0 - d.phi);
  return eta;
}

inline void update_xi(DspState& d, const DspConfig& cfg, Rng& rng) {
  const auto eta = dsp_innovations(d);
  d.xi.resize(eta.size());
  for (std::size_t t = 0; t < eta.size(); ++t) d.xi[t] = sample_polya_gamma(cfg.pg_shape(), eta[t], rng);
}

struct ScalarGaussian {
  double mean;
  double variance;
};

/// mu | v, xi, xi_mu, phi.
///
/// Displayed: uses the sqrt(xi)-weighted statistic of the t >= 2 innovations,
///   vhat = sum sqrt(xi_t)(v_t - phi v_{t-1}) / ((1 - phi) sum sqrt(xi_t)),
///   vhat ~ N(mu, (T - 1) / ((1 - phi) sum sqrt(xi_t))^2).
/// Exact: conditions on every innovation including eta_1.
inline ScalarGaussian mu_conditional(const DspState& d, const DspConfig& cfg) {
  const std::size_t n = d.v.size();
  const double shift = cfg.eta_shift_numerator();
  const double one_minus_phi = 1.0 - d.phi;
  if (cfg.mu_update == MuUpdate::Displayed) {
    double num = 0.0, root_sum = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      const double r = std::sqrt(d.xi[t]);
      num += r * (d.v[t] - d.phi * d.v[t - 1] - shift / d.xi[t]);
      root_sum += r;
    }
    const double scale = one_minus_phi * root_sum;
    const double vhat = num / scale;
    const double var_hat = static_cast<double>(n - 1) / (scale * scale);
    const double prec = 1.0 / var_hat + d.xi_mu;
    return {vhat / var_hat / prec, 1.0 / prec};
  }
  double prec = d.xi[0] + d.xi_mu;
  double lin = d.xi[0] * (d.v[0] - shift / d.xi[0]);
  for (std::size_t t = 1; t < n; ++t) {
    prec += one_minus_phi * one_minus_phi * d.xi[t];
    lin += one_minus_phi * d.xi[t] * (d.v[t] - d.phi * d.v[t - 1] - shift / d.xi[t]);
  }
  return {lin / prec, 1.0 / prec};
}

inline void update_mu(DspState& d, const DspConfig& cfg, Rng& rng) {
  const auto g = mu_conditional(d, cfg);
  d.mu = g.mean + std::sqrt(g.variance) * standard_normal(rng);
}

inline void update_xi_mu(DspState& d, Rng& rng) { d.xi_mu = sample_polya_gamma(1, d.mu, rng); }

/// Gaussian pseudo-likelihood of phi built from the lag ratios
///   r_t = ((v_t - mu) / (v_{t-1} - mu) + 1) / 2,   vhat = mean r_t ~ N((phi + 1) / 2, s2),
///   s2 = (1 / n^2) sum 1 / (4 xi_t (v_{t-1} - mu)^2),
/// with n the number of terms kept after dropping near-zero denominators.
struct PhiPseudoLikelihood {
  double vhat = 0.0;
  double variance = 1.0;
  std::size_t kept = 0;
  std::size_t dropped = 0;

  double operator()(double phi) const {
    const double d = vhat - 0.5 * (phi + 1.0);
    return -0.5 * d * d / variance;
  }
};

inline PhiPseudoLikelihood phi_pseudo_likelihood(const DspState& d) {
  PhiPseudoLikelihood pl;
  double sum = 0.0, var_sum = 0.0;
  for (std::size_t t = 1; t < d.v.size(); ++t) {
    const double den = d.v[t - 1] - d.mu;
    if (std::abs(den) < kPhiDenominatorFloor) {
      ++pl.dropped;
      continue;
    }
    sum += 0.5 * ((d.v[t] - d.mu) / den + 1.0);
    var_sum += 1.0 / (4.0 * d.xi[t] * den * den);
    ++pl.kept;
  }
  if (pl.kept == 0) {
    pl.variance = std::numeric_limits<double>::infinity();
    return pl;
  }
  const double n = static_cast<double>(pl.kept);
  pl.vhat = sum / n;
  pl.variance = var_sum / (n * n);
  return pl;
}

inline void update_phi(DspState& d, const DspConfig& cfg, Rng& rng) {
  if (cfg.fix_phi) {
    d.phi = 0.0;
    return;
  }
  const auto pl = phi_pseudo_likelihood(d);
  d.phi_dropped_terms = pl.dropped;
  if (pl.kept == 0 || !std::isfinite(pl.variance) || !(pl.variance > 0.0)) {
    d.phi = slice_sample_phi(d.phi, [](double) { return 0.0; }, cfg.phi_prior, rng);
    return;
  }
  d.phi = slice_sample_phi(d.phi, pl, cfg.phi_prior, rng);
}

// ---------------------------------------------------------------------------------------------
// Random-walk variants

/// Fills the h-prior log evolution variances: the k initial levels get a diffuse prior, the
/// proper increments get `increment_var(t)`.
template <class F>
inline void set_random_walk_log_variances(ChainState& st, int k, F&& increment_var) {
  const std::size_t n = st.h.size();
  st.vol.v.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    st.vol.v[t] = t < static_cast<std::size_t>(k) ? std::log(kDiffuseInitialVariance) : std::log(increment_var(t));
}

/// sigma2_h | h ~ IG(0.01 + n/2, 0.01 + sum(dh^2)/2) over the n = T - k proper increments.
inline void update_rwsv_variance(ChainState& st, int k, Rng& rng) {
  const auto dh = DifferenceOperator(st.h.size(), k).apply(st.h);
  double ss = 0.0;
  for (double x : dh) ss += x * x;
  st.sigma2_h = sample_inverse_gamma(kRwsvPriorShape + 0.5 * static_cast<double>(dh.size()), kRwsvPriorRate + 0.5 * ss, rng);
  set_random_walk_log_variances(st, k, [&](std::size_t) { return st.sigma2_h; });
}

/// Bayesian-LASSO local variances and Lambda^2:
///   1 / sigma2_t ~ InverseGaussian(sqrt(Lambda^2 / dh_t^2), Lambda^2),
///   Lambda^2 ~ Gamma(r + n, delta + sum sigma2_t / 2).
inline void update_lasso(ChainState& st, int k, double offset_c, Rng& rng) {
  const auto dh = DifferenceOperator(st.h.size(), k).apply(st.h);
  st.sigma2_t_bl.resize(dh.size());
  double total = 0.0;
  for (std::size_t t = 0; t < dh.size(); ++t) {
    const double d2 = std::max(dh[t] * dh[t], offset_c);
    const double inv = sample_inverse_gaussian(std::sqrt(st.lambda2_bl / d2), st.lambda2_bl, rng);
    st.sigma2_t_bl[t] = 1.0 / inv;
    total += st.sigma2_t_bl[t];
  }
  st.lambda2_bl = sample_gamma(kLassoPriorShape + static_cast<double>(dh.size()), kLassoPriorRate + 0.5 * total, rng);
  set_random_walk_log_variances(st, k, [&](std::size_t t) { return st.sigma2_t_bl[t - static_cast<std::size_t>(k)]; });
}

// ---------------------------------------------------------------------------------------------
// Joint mean and volatility (BTF-ASV)

/// beta | h, v_beta, y: precision Q_{v_beta} + diag(e^{-h}), linear y e^{-h}.
inline GaussianCanonical beta_conditional(std::span<const double> y, std::span<const double> h,
                                          std::span<const double> v_beta, int k_beta) {
  GaussianCanonical g{build_Qv(v_beta, k_beta), std::vector<double>(y.size())};
  auto diag = g.precision.band(0);
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double prec = std::exp(-h[t]);
    diag[t] += prec;
    g.linear[t] = y[t] * prec;
  }
  return g;
}

/// Runs one full DSP sweep (s, v, xi, mu, xi_mu, phi) on the evolution variances of `path`.
inline void update_dsp_block(DspState& d, std::span<const double> path, const DspConfig& cfg, const OmoriMixture& mix, Rng& rng) {
  const auto omega = omega_star(path, cfg.k, cfg.offset_c);
  update_s(d, omega, mix, rng);
  update_v(d, omega, cfg, mix, rng);
  update_xi(d, cfg, rng);
  update_mu(d, cfg, rng);
  update_xi_mu(d, rng);
  update_phi(d, cfg, rng);
}

/// beta, then the DSP blocks of its evolution variances.
inline void update_btf_mean(ChainState& st, std::span<const double> y, const DspConfig& beta_cfg, const OmoriMixture& mix, Rng& rng) {
  st.beta = beta_conditional(y, st.h, st.mean_dsp.v, beta_cfg.k).draw(rng);
  update_dsp_block(st.mean_dsp, st.beta, beta_cfg, mix, rng);
}

}  // namespace asv
