#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include "asv/error.hpp"
#include "asv/omori_table.hpp"

namespace asv {

/// Ten-component Gaussian mixture for log(eps^2), eps ~ N(0,1).
struct OmoriMixture {
  static constexpr std::size_t kComponents = 10;

  std::array<double, kComponents> p{};
  std::array<double, kComponents> m{};
  std::array<double, kComponents> w2{};

  double mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < kComponents; ++i) acc += p[i] * m[i];
    return acc;
  }

  double variance() const {
    const double mu = mean();
    double acc = 0.0;
    for (std::size_t i = 0; i < kComponents; ++i) acc += p[i] * (w2[i] + (m[i] - mu) * (m[i] - mu));
    return acc;
  }

  /// Rows of "p m w2"; '#' starts a comment. Weights are renormalized to sum to one.
  static OmoriMixture parse(std::string_view text) {
    OmoriMixture mix;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      double p = 0, m = 0, w2 = 0;
      if (!(fields >> p)) continue;
      if (!(fields >> m >> w2)) throw InvalidArgument("mixture table: row " + std::to_string(row + 1) + " needs 3 columns");
      if (row >= kComponents) throw InvalidArgument("mixture table: more than 10 rows");
      mix.p[row] = p;
      mix.m[row] = m;
      mix.w2[row] = w2;
      ++row;
    }
    if (row != kComponents) throw InvalidArgument("mixture table: expected 10 rows, got " + std::to_string(row));
    double total = 0.0;
    for (std::size_t i = 0; i < kComponents; ++i) {
      if (!(mix.p[i] > 0.0)) throw InvalidArgument("mixture table: weights must be positive");
      if (!(mix.w2[i] > 0.0)) throw InvalidArgument("mixture table: variances must be positive");
      total += mix.p[i];
    }
    for (auto& p : mix.p) p /= total;
    mix.validate();
    return mix;
  }

  static OmoriMixture load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open mixture table '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  /// The published table checked in under data/.
  static const OmoriMixture& standard() {
    static const OmoriMixture mix = parse(detail::kOmoriTableText);
    return mix;
  }

  /// Exact moments of log(chi^2_1): digamma(1/2) + log 2 and trigamma(1/2).
  static double log_chisq1_mean() { return -std::numbers::egamma - std::numbers::ln2; }
  static double log_chisq1_variance() { return std::numbers::pi * std::numbers::pi / 2.0; }

  /// Guards against transcription errors in the table.
  void validate() const {
    if (std::abs(mean() - log_chisq1_mean()) > 0.01)
      throw InvalidArgument("mixture table: mean " + std::to_string(mean()) + " does not match log(chi^2_1)");
    if (std::abs(variance() - log_chisq1_variance()) > 0.05)
      throw InvalidArgument("mixture table: variance " + std::to_string(variance()) +
                            " does not match log(chi^2_1)");
  }
};

}  // namespace asv
