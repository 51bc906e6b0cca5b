#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asv/error.hpp"

namespace asv {

/// Observed univariate series with optional per-index labels (dates, ids).
struct TimeSeries {
  std::vector<double> values;
  std::vector<std::string> labels;  // empty, or one per value

  static constexpr std::size_t kMinLength = 8;

  std::size_t size() const noexcept { return values.size(); }

  void validate() const {
    if (values.size() < kMinLength)
      throw InvalidArgument("time series needs at least " + std::to_string(kMinLength) + " observations, got " +
                            std::to_string(values.size()));
    if (!labels.empty() && labels.size() != values.size())
      throw InvalidArgument("label count does not match value count");
    for (std::size_t t = 0; t < values.size(); ++t)
      if (!std::isfinite(values[t])) throw InvalidArgument("non-finite observation at index " + std::to_string(t));
  }
};

enum class Variant { RWSV, RWSV_BL, ASV_HS, ASV_DHS, ASV_HS_N, ASV_DHS_N, BTF_ASV };

inline constexpr Variant kAllVariants[] = {Variant::RWSV,     Variant::RWSV_BL,   Variant::ASV_HS, Variant::ASV_DHS,
                                           Variant::ASV_HS_N, Variant::ASV_DHS_N, Variant::BTF_ASV};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::RWSV: return "rwsv";
    case Variant::RWSV_BL: return "rwsv_bl";
    case Variant::ASV_HS: return "asv_hs";
    case Variant::ASV_DHS: return "asv_dhs";
    case Variant::ASV_HS_N: return "asv_hs_n";
    case Variant::ASV_DHS_N: return "asv_dhs_n";
    case Variant::BTF_ASV: return "btf_asv";
  }
  return "unknown";
}

/// Case-insensitive; accepts '-' or '_' as separator ("ASV-DHS-N", "asv_dhs_n").
inline Variant parse_variant(std::string_view name) {
  std::string key;
  for (char c : name) key.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (Variant v : kAllVariants)
    if (to_string(v) == key) return v;
  throw InvalidArgument("unknown model variant '" + std::string(name) + "'");
}

/// Variants whose log-volatility prior is a dynamic shrinkage process.
constexpr bool uses_dsp(Variant v) { return v != Variant::RWSV && v != Variant::RWSV_BL; }
/// phi is pinned at zero (horseshoe) rather than sampled.
constexpr bool fixes_phi(Variant v) { return v == Variant::ASV_HS || v == Variant::ASV_HS_N; }
constexpr bool has_nugget(Variant v) { return v == Variant::ASV_HS_N || v == Variant::ASV_DHS_N; }

/// Prior on (phi + 1) / 2.
enum class PhiPrior { Beta10_2, Beta_half_half };

/// How mu is drawn. `Displayed` uses the sqrt(xi)-weighted summary statistic; `Exact` is the
/// full Gaussian conditional given every innovation.
enum class MuUpdate { Displayed, Exact };

struct ModelSpec {
  Variant variant = Variant::ASV_DHS;
  int k = 1;       // differencing order of the log-variance prior
  int k_beta = 2;  // differencing order of the mean prior (BTF_ASV)
  double a = 0.5;
  double b = 0.5;
  std::uint64_t seed = 1;
  std::size_t n_burn = 20000;
  std::size_t n_draw = 5000;
  std::size_t thin = 1;
  double offset_c = 1e-8;
  PhiPrior phi_prior = PhiPrior::Beta10_2;
  MuUpdate mu_update = MuUpdate::Displayed;

  void validate() const {
    if (k < 1 || k > 3) throw InvalidArgument("differencing order k must be in 1..3, got " + std::to_string(k));
    if (variant == Variant::BTF_ASV && (k_beta < 1 || k_beta > 3))
      throw InvalidArgument("differencing order k_beta must be in 1..3, got " + std::to_string(k_beta));
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("DSP shapes a and b must be positive");
    const double ab = a + b;
    if (std::abs(ab - std::round(ab)) > 1e-12 || ab < 1.0)
      throw InvalidArgument("a + b must be a positive integer for the Polya-Gamma augmentation");
    if (thin < 1) throw InvalidArgument("thin must be >= 1");
    if (n_draw < thin) throw InvalidArgument("n_draw must be at least thin");
    if (!(offset_c > 0.0)) throw InvalidArgument("offset_c must be positive");
  }

  /// Number of retained rows: n_draw / thin, remainder dropped.
  std::size_t retained() const noexcept { return n_draw / thin; }
};

}  // namespace asv
