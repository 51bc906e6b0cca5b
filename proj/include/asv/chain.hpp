#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asv/difference.hpp"
#include "asv/error.hpp"
#include "asv/model.hpp"
#include "asv/omori.hpp"
#include "asv/rng.hpp"
#include "asv/samplers.hpp"
#include "asv/stats.hpp"

namespace asv {

/// Retained posterior samples, one row per kept sweep, with named column blocks.
class PosteriorDraws {
 public:
  struct Field {
    std::string name;
    std::size_t offset;
    std::size_t length;

    bool operator==(const Field&) const = default;
  };

  void add_field(std::string name, std::size_t length) {
    if (rows_ != 0) throw InvalidArgument("PosteriorDraws: cannot add fields after rows");
    fields_.push_back({std::move(name), width_, length});
    width_ += length;
  }

  bool has(std::string_view name) const {
    return std::any_of(fields_.begin(), fields_.end(), [&](const Field& f) { return f.name == name; });
  }

  const Field& field(std::string_view name) const {
    for (const auto& f : fields_)
      if (f.name == name) return f;
    throw InvalidArgument("PosteriorDraws: no field '" + std::string(name) + "'");
  }

  const std::vector<Field>& fields() const noexcept { return fields_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t width() const noexcept { return width_; }

  std::span<double> append_row() {
    data_.resize(data_.size() + width_, 0.0);
    ++rows_;
    return {data_.data() + (rows_ - 1) * width_, width_};
  }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * width_, width_}; }

  std::span<const double> row(std::string_view name, std::size_t r) const {
    const auto& f = field(name);
    return row(r).subspan(f.offset, f.length);
  }

  /// All retained draws of element `index` of a field.
  std::vector<double> column(std::string_view name, std::size_t index = 0) const {
    const auto& f = field(name);
    if (index >= f.length) throw InvalidArgument("PosteriorDraws: index out of range for '" + f.name + "'");
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * width_ + f.offset + index];
    return out;
  }

  /// Per-element posterior mean of transform(x).
  std::vector<double> mean(std::string_view name, const std::function<double(double)>& transform = {}) const {
    const auto& f = field(name);
    std::vector<double> out(f.length, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t i = 0; i < f.length; ++i) {
        const double x = data_[r * width_ + f.offset + i];
        out[i] += transform ? transform(x) : x;
      }
    for (auto& x : out) x /= static_cast<double>(rows_);
    return out;
  }

  /// Per-element q-quantile of transform(x); monotone in q.
  std::vector<double> quantile(std::string_view name, double q, const std::function<double(double)>& transform = {}) const {
    const auto& f = field(name);
    std::vector<double> out(f.length);
    for (std::size_t i = 0; i < f.length; ++i) {
      auto col = column(name, i);
      if (transform)
        for (auto& x : col) x = transform(x);
      out[i] = stats::quantile(col, q);
    }
    return out;
  }

  std::vector<double> sd(std::string_view name) const {
    const auto& f = field(name);
    std::vector<double> out(f.length);
    for (std::size_t i = 0; i < f.length; ++i) out[i] = stats::sd(column(name, i));
    return out;
  }

  bool operator==(const PosteriorDraws&) const = default;

 private:
  std::vector<Field> fields_;
  std::size_t width_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> data_;
};

/// Centered moving average with the window truncated at the edges.
inline std::vector<double> rolling_mean(std::span<const double> x, std::size_t width) {
  const std::size_t n = x.size();
  const std::size_t half = width / 2;
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t > half ? t - half : 0;
    const std::size_t hi = std::min(n - 1, t + half);
    double acc = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) acc += x[i];
    out[t] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

inline constexpr std::size_t kInitWindow = 11;

/// Starting values for one DSP block attached to `path`.
inline DspState initial_dsp_state(std::span<const double> path, int k, double offset, bool fix_phi) {
  DspState d;
  const std::size_t n = path.size();
  d.v.assign(n, 0.0);
  d.s.assign(n, 4);
  d.xi.assign(n, 1.0);
  d.xi_mu = 1.0;
  d.phi = fix_phi ? 0.0 : 0.5;
  const auto diffs = DifferenceOperator(n, k).apply(path);
  const auto logs = log_square(diffs, offset);
  d.mu = std::accumulate(logs.begin(), logs.end(), 0.0) / static_cast<double>(logs.size());
  return d;
}

/// Single-chain Gibbs sampler. Sweep order per iteration:
///   [BTF-ASV: beta, s_beta, v_beta, xi_beta, mu_beta, xi_mu_beta, phi_beta]
///   j, h, [nugget: sigma2_c, h*], then
///   DSP variants: s, v, xi, mu, xi_mu, phi
///   RWSV: sigma2_h;  RWSV-BL: local variances and Lambda^2.
class GibbsSampler {
 public:
  GibbsSampler(const TimeSeries& y, const ModelSpec& spec, const OmoriMixture& mix = OmoriMixture::standard())
      : spec_(spec), mix_(mix), y_(y.values), rng_(make_rng(spec.seed)) {
    spec_.validate();
    y.validate();
    if (y_.size() <= static_cast<std::size_t>(std::max(spec_.k, spec_.variant == Variant::BTF_ASV ? spec_.k_beta : 1)))
      throw InvalidArgument("series too short for the differencing order");
    vol_cfg_ = dsp_config(spec_, spec_.k);
    beta_cfg_ = dsp_config(spec_, spec_.k_beta);
    initialize();
  }

  /// Starts from an explicit state (used by validation tests). `y_star` replaces log(y^2 + c).
  GibbsSampler(std::vector<double> y_star, const ModelSpec& spec, ChainState state, Rng rng,
               const OmoriMixture& mix = OmoriMixture::standard())
      : spec_(spec), mix_(mix), rng_(std::move(rng)), state_(std::move(state)), y_star_(std::move(y_star)) {
    spec_.validate();
    if (spec_.variant == Variant::BTF_ASV) throw InvalidArgument("explicit y* start is not defined for BTF-ASV");
    vol_cfg_ = dsp_config(spec_, spec_.k);
    beta_cfg_ = dsp_config(spec_, spec_.k_beta);
  }

  const ChainState& state() const noexcept { return state_; }
  ChainState& state() noexcept { return state_; }
  const ModelSpec& spec() const noexcept { return spec_; }
  std::span<const double> y_star() const noexcept { return y_star_; }

  void sweep() {
    const Variant var = spec_.variant;
    const int k = spec_.k;
    if (var == Variant::BTF_ASV) {
      step("beta", [&] { update_btf_mean(state_, y_, beta_cfg_, mix_, rng_); });
      check(state_.beta, "beta");
      check(state_.mean_dsp.v, "v_beta");
      check_scalar(state_.mean_dsp.mu, "mu_beta");
      std::vector<double> resid(y_.size());
      for (std::size_t t = 0; t < y_.size(); ++t) resid[t] = y_[t] - state_.beta[t];
      y_star_ = log_square(resid, spec_.offset_c);
    }

    step("j", [&] { update_j(state_, y_star_, mix_, rng_); });
    step("h", [&] { update_h(state_, y_star_, k, has_nugget(var), mix_, rng_); });
    check(state_.h, "h");

    if (has_nugget(var)) {
      step("nugget", [&] { update_nugget(state_, k, rng_); });
      check_scalar(state_.sigma2_c, "sigma2_c");
      check(state_.h_star, "h_star");
    }

    if (var == Variant::RWSV) {
      step("sigma2_h", [&] { update_rwsv_variance(state_, k, rng_); });
      check_scalar(state_.sigma2_h, "sigma2_h");
    } else if (var == Variant::RWSV_BL) {
      step("lasso", [&] { update_lasso(state_, k, spec_.offset_c, rng_); });
      check_scalar(state_.lambda2_bl, "lasso");
      check(state_.vol.v, "lasso");
    } else {
      DspState& d = state_.vol;
      const auto omega = omega_star(has_nugget(var) ? state_.h_star : state_.h, k, spec_.offset_c);
      step("s", [&] { update_s(d, omega, mix_, rng_); });
      step("v", [&] { update_v(d, omega, vol_cfg_, mix_, rng_); });
      check(d.v, "v");
      step("xi", [&] { update_xi(d, vol_cfg_, rng_); });
      check(d.xi, "xi");
      step("mu", [&] { update_mu(d, vol_cfg_, rng_); });
      check_scalar(d.mu, "mu");
      step("xi_mu", [&] { update_xi_mu(d, rng_); });
      check_scalar(d.xi_mu, "xi_mu");
      step("phi", [&] { update_phi(d, vol_cfg_, rng_); });
      check_scalar(d.phi, "phi");
    }
    ++iteration_;
  }

  std::size_t iteration() const noexcept { return iteration_; }

  /// Column layout of the retained draws for this variant.
  PosteriorDraws make_draws() const {
    PosteriorDraws draws;
    const std::size_t n = state_.h.size();
    draws.add_field("h", n);
    draws.add_field("v", n);
    if (uses_dsp(spec_.variant)) {
      draws.add_field("mu", 1);
      draws.add_field("phi", 1);
      draws.add_field("xi_mu", 1);
    }
    if (has_nugget(spec_.variant)) {
      draws.add_field("h_star", n);
      draws.add_field("sigma2_c", 1);
    }
    if (spec_.variant == Variant::RWSV) draws.add_field("sigma2_h", 1);
    if (spec_.variant == Variant::RWSV_BL) draws.add_field("lambda2", 1);
    if (spec_.variant == Variant::BTF_ASV) {
      draws.add_field("beta", n);
      draws.add_field("v_beta", n);
      draws.add_field("mu_beta", 1);
      draws.add_field("phi_beta", 1);
    }
    return draws;
  }

  void record(PosteriorDraws& draws) const {
    auto row = draws.append_row();
    auto put = [&](std::string_view name, std::span<const double> x) {
      const auto& f = draws.field(name);
      std::copy(x.begin(), x.end(), row.begin() + static_cast<std::ptrdiff_t>(f.offset));
    };
    auto put1 = [&](std::string_view name, double x) { row[draws.field(name).offset] = x; };
    put("h", state_.h);
    put("v", state_.vol.v);
    if (draws.has("mu")) {
      put1("mu", state_.vol.mu);
      put1("phi", state_.vol.phi);
      put1("xi_mu", state_.vol.xi_mu);
    }
    if (draws.has("h_star")) {
      put("h_star", state_.h_star);
      put1("sigma2_c", state_.sigma2_c);
    }
    if (draws.has("sigma2_h")) put1("sigma2_h", state_.sigma2_h);
    if (draws.has("lambda2")) put1("lambda2", state_.lambda2_bl);
    if (draws.has("beta")) {
      put("beta", state_.beta);
      put("v_beta", state_.mean_dsp.v);
      put1("mu_beta", state_.mean_dsp.mu);
      put1("phi_beta", state_.mean_dsp.phi);
    }
  }

  /// n_burn + n_draw sweeps; keeps every thin-th post-burn-in state.
  PosteriorDraws run() {
    PosteriorDraws draws = make_draws();
    for (std::size_t i = 0; i < spec_.n_burn; ++i) sweep();
    for (std::size_t i = 0; i < spec_.n_draw; ++i) {
      sweep();
      if ((i + 1) % spec_.thin == 0 && draws.rows() < spec_.retained()) record(draws);
    }
    return draws;
  }

 private:
  void initialize() {
    const std::size_t n = y_.size();
    const Variant var = spec_.variant;
    const int k = spec_.k;
    std::vector<double> resid = y_;
    if (var == Variant::BTF_ASV) {
      state_.beta = rolling_mean(y_, kInitWindow);
      for (std::size_t t = 0; t < n; ++t) resid[t] = y_[t] - state_.beta[t];
      state_.mean_dsp = initial_dsp_state(state_.beta, spec_.k_beta, spec_.offset_c, false);
    }
    y_star_ = log_square(resid, spec_.offset_c);
    state_.h = rolling_mean(y_star_, kInitWindow);
    state_.j.assign(n, 4);
    state_.vol = initial_dsp_state(state_.h, k, spec_.offset_c, fixes_phi(var));
    state_.sigma2_c = 0.1;
    if (has_nugget(var)) state_.h_star = state_.h;
    if (var == Variant::RWSV) {
      state_.sigma2_h = 1.0;
      set_random_walk_log_variances(state_, k, [](std::size_t) { return 1.0; });
    }
    if (var == Variant::RWSV_BL) {
      state_.lambda2_bl = 1.0;
      state_.sigma2_t_bl.assign(n - static_cast<std::size_t>(k), 1.0);
      set_random_walk_log_variances(state_, k, [](std::size_t) { return 1.0; });
    }
  }

  template <class F>
  void step(const char* block, F&& update) {
    try {
      update();
    } catch (const DivergenceError&) {
      throw;
    } catch (const NumericError& e) {
      throw DivergenceError(iteration_, block, e.what());
    }
  }

  void check(std::span<const double> x, const char* block) const {
    for (std::size_t t = 0; t < x.size(); ++t)
      if (!std::isfinite(x[t])) throw DivergenceError(iteration_, block, "non-finite value at index " + std::to_string(t));
  }

  void check_scalar(double x, const char* block) const {
    if (!std::isfinite(x)) throw DivergenceError(iteration_, block, "non-finite value");
  }

  ModelSpec spec_;
  OmoriMixture mix_;
  std::vector<double> y_;
  Rng rng_;
  ChainState state_;
  std::vector<double> y_star_;
  DspConfig vol_cfg_;
  DspConfig beta_cfg_;
  std::size_t iteration_ = 0;
};

/// Runs one chain. Identical (y, spec) gives bit-identical draws. Numerical failures inside a
/// block surface as DivergenceError naming the iteration and block.
inline PosteriorDraws run_chain(const TimeSeries& y, const ModelSpec& spec, const OmoriMixture& mix = OmoriMixture::standard()) {
  GibbsSampler sampler(y, spec, mix);
  return sampler.run();
}

}  // namespace asv
