#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "asv/chain.hpp"
#include "asv/error.hpp"
#include "asv/stats.hpp"

namespace asv::eval {

/// Point estimate and equal-tailed 90% band for sigma_t = exp(h_t / 2).
struct VolEstimate {
  std::vector<double> point;
  std::vector<double> q05;
  std::vector<double> q95;

  std::size_t size() const noexcept { return point.size(); }
};

inline double half_exp(double h) { return std::exp(0.5 * h); }

/// Posterior mean of exp(h/2) (not exp of the mean) and its 5% / 95% quantiles.
inline VolEstimate volatility_estimate(const PosteriorDraws& draws, std::string_view field = "h") {
  return {draws.mean(field, half_exp), draws.quantile(field, 0.05, half_exp), draws.quantile(field, 0.95, half_exp)};
}

namespace detail {
inline void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("metric inputs differ in length (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  if (a == 0) throw InvalidArgument("metric inputs are empty");
}
}  // namespace detail

/// (1/T) sum |sigma_t - sigma_hat_t|
inline double mae(std::span<const double> truth, const VolEstimate& est) {
  detail::check_lengths(truth.size(), est.point.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) acc += std::abs(truth[t] - est.point[t]);
  return acc / static_cast<double>(truth.size());
}

/// Fraction of t with sigma_t strictly inside (q05_t, q95_t).
inline double ec(std::span<const double> truth, const VolEstimate& est) {
  detail::check_lengths(truth.size(), est.q05.size());
  detail::check_lengths(truth.size(), est.q95.size());
  std::size_t hits = 0;
  for (std::size_t t = 0; t < truth.size(); ++t)
    if (truth[t] > est.q05[t] && truth[t] < est.q95[t]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

/// (1/T) sum (q95_t - q05_t)
inline double mciw(const VolEstimate& est) {
  detail::check_lengths(est.q05.size(), est.q95.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < est.q05.size(); ++t) acc += est.q95[t] - est.q05[t];
  return acc / static_cast<double>(est.q05.size());
}

struct Metrics {
  double mae;
  double ec;
  double mciw;
};

inline Metrics metrics(std::span<const double> truth, const VolEstimate& est) {
  return {mae(truth, est), ec(truth, est), mciw(est)};
}

/// Smoothness and adaptivity summaries of an estimated log-variance path.
struct SummaryStats {
  double mean_abs_diff;
  double excess_kurtosis;  // of the increments; 0 for Gaussian increments
  std::size_t cp_count;    // increments with |dh| > 5 sd(dh)
  bool cp_undefined;       // increments have zero variance
};

inline constexpr double kChangePointSdMultiple = 5.0;

inline SummaryStats summary_stats(std::span<const double> h_hat) {
  if (h_hat.size() < 3) throw InvalidArgument("summary_stats needs at least 3 points");
  std::vector<double> d(h_hat.size() - 1);
  for (std::size_t t = 1; t < h_hat.size(); ++t) d[t - 1] = h_hat[t] - h_hat[t - 1];
  SummaryStats out{};
  double abs_sum = 0.0;
  for (double x : d) abs_sum += std::abs(x);
  out.mean_abs_diff = abs_sum / static_cast<double>(d.size());
  const double sd = stats::sd(d);
  if (!(sd > 0.0)) {
    out.excess_kurtosis = 0.0;
    out.cp_count = 0;
    out.cp_undefined = true;
    return out;
  }
  out.excess_kurtosis = stats::excess_kurtosis(d);
  const double delta = kChangePointSdMultiple * sd;
  for (double x : d)
    if (std::abs(x) > delta) ++out.cp_count;
  out.cp_undefined = false;
  return out;
}

inline double kappa(double v) { return 1.0 / (1.0 + std::exp(v)); }

inline constexpr double kKappaThreshold = 0.9;

struct KappaFlags {
  std::vector<double> kappa_mean;    // posterior mean of 1 / (1 + e^{v_t})
  std::vector<std::size_t> flagged;  // indices with kappa_mean < threshold
};

/// Flags t whose posterior mean shrinkage coefficient falls below `threshold`. Indices before
/// `first_index` (initial-level rows of the difference prior) are reported but never flagged.
inline KappaFlags kappa_flags(const PosteriorDraws& draws, double threshold = kKappaThreshold,
                              std::size_t first_index = 0, std::string_view field = "v") {
  if (draws.rows() == 0) throw InvalidArgument("kappa_flags: no draws");
  KappaFlags out;
  out.kappa_mean = draws.mean(field, kappa);
  for (std::size_t t = first_index; t < out.kappa_mean.size(); ++t)
    if (out.kappa_mean[t] < threshold) out.flagged.push_back(t);
  return out;
}

/// Same rule on a plain [draw][t] matrix of v.
inline KappaFlags kappa_flags(const std::vector<std::vector<double>>& v_draws, double threshold = kKappaThreshold,
                              std::size_t first_index = 0) {
  if (v_draws.empty()) throw InvalidArgument("kappa_flags: no draws");
  KappaFlags out;
  const std::size_t n = v_draws.front().size();
  out.kappa_mean.assign(n, 0.0);
  for (const auto& row : v_draws) {
    if (row.size() != n) throw InvalidArgument("kappa_flags: ragged draws");
    for (std::size_t t = 0; t < n; ++t) out.kappa_mean[t] += kappa(row[t]);
  }
  for (auto& k : out.kappa_mean) k /= static_cast<double>(v_draws.size());
  for (std::size_t t = first_index; t < n; ++t)
    if (out.kappa_mean[t] < threshold) out.flagged.push_back(t);
  return out;
}

}  // namespace asv::eval
