#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "asv/difference.hpp"
#include "asv/error.hpp"
#include "asv/rng.hpp"

namespace asv {

/// Symmetric banded matrix stored as its lower bands, one contiguous vector per diagonal:
/// band(d)[i] = Q(i + d, i) for d = 0..bandwidth.
class BandedSPD {
 public:
  BandedSPD() = default;
  BandedSPD(std::size_t dim, std::size_t bandwidth) : dim_(dim), bandwidth_(bandwidth), bands_(bandwidth + 1) {
    for (std::size_t d = 0; d <= bandwidth; ++d) bands_[d].assign(d < dim ? dim - d : 0, 0.0);
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t bandwidth() const noexcept { return bandwidth_; }

  std::span<double> band(std::size_t d) { return bands_[d]; }
  std::span<const double> band(std::size_t d) const { return bands_[d]; }

  /// Entry (i, j) of the full symmetric matrix; zero outside the band.
  double operator()(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    const std::size_t d = i - j;
    return d > bandwidth_ ? 0.0 : bands_[d][j];
  }

  /// Adds `value` to entry (i, j) and its mirror; |i - j| must lie within the band.
  void add(std::size_t i, std::size_t j, double value) {
    if (i < j) std::swap(i, j);
    bands_[i - j][j] += value;
  }

  void add_diagonal(std::span<const double> diag) {
    for (std::size_t i = 0; i < dim_; ++i) bands_[0][i] += diag[i];
  }

  void add_diagonal(double value) {
    for (auto& x : bands_[0]) x += value;
  }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) y[i] += bands_[0][i] * x[i];
    for (std::size_t d = 1; d <= bandwidth_ && d < dim_; ++d) {
      for (std::size_t j = 0; j + d < dim_; ++j) {
        const double q = bands_[d][j];
        y[j + d] += q * x[j];
        y[j] += q * x[j + d];
      }
    }
    return y;
  }

  std::vector<std::vector<double>> dense() const {
    std::vector<std::vector<double>> m(dim_, std::vector<double>(dim_, 0.0));
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m[i][j] = (*this)(i, j);
    return m;
  }

 private:
  std::size_t dim_ = 0;
  std::size_t bandwidth_ = 0;
  std::vector<std::vector<double>> bands_;
};

/// Lower banded Cholesky factor L with Q = L L'. Same storage layout as BandedSPD.
class BandedCholesky {
 public:
  explicit BandedCholesky(const BandedSPD& q) : factor_(q) {
    const std::size_t n = q.dim();
    const std::size_t k = q.bandwidth();
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lo = j > k ? j - k : 0;
      double pivot = factor_.band(0)[j];
      for (std::size_t p = lo; p < j; ++p) {
        const double l = at(j, p);
        pivot -= l * l;
      }
      if (!(pivot > 0.0) || !std::isfinite(pivot)) throw NotPositiveDefinite(j, pivot);
      const double ljj = std::sqrt(pivot);
      factor_.band(0)[j] = ljj;
      const std::size_t hi = std::min(n - 1, j + k);
      for (std::size_t i = j + 1; i <= hi; ++i) {
        const std::size_t lo_i = i > k ? i - k : 0;
        double v = at(i, j);
        for (std::size_t p = std::max(lo, lo_i); p < j; ++p) v -= at(i, p) * at(j, p);
        factor_.band(i - j)[j] = v / ljj;
      }
    }
  }

  std::size_t dim() const noexcept { return factor_.dim(); }

  /// Solves L z = rhs.
  std::vector<double> solve_lower(std::span<const double> rhs) const {
    const std::size_t n = dim(), k = factor_.bandwidth();
    std::vector<double> z(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > k ? i - k : 0;
      double v = z[i];
      for (std::size_t p = lo; p < i; ++p) v -= at(i, p) * z[p];
      z[i] = v / at(i, i);
    }
    return z;
  }

  /// Solves L' x = rhs.
  std::vector<double> solve_upper(std::span<const double> rhs) const {
    const std::size_t n = dim(), k = factor_.bandwidth();
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t ii = n; ii-- > 0;) {
      const std::size_t hi = std::min(n - 1, ii + k);
      double v = x[ii];
      for (std::size_t p = ii + 1; p <= hi; ++p) v -= at(p, ii) * x[p];
      x[ii] = v / at(ii, ii);
    }
    return x;
  }

  std::vector<double> solve(std::span<const double> rhs) const { return solve_upper(solve_lower(rhs)); }

 private:
  double at(std::size_t i, std::size_t j) const { return factor_.band(i - j)[j]; }

  BandedSPD factor_;
};

inline std::vector<double> solve(const BandedSPD& q, std::span<const double> rhs) {
  if (rhs.size() != q.dim()) throw InvalidArgument("solve: dimension mismatch");
  return BandedCholesky(q).solve(rhs);
}

/// One draw from N(Q^{-1} linear, Q^{-1}): factor once, then L' x = L^{-1} linear + z with z ~ N(0, I).
inline std::vector<double> sample_gaussian_canonical(const BandedSPD& q, std::span<const double> linear, Rng& rng) {
  if (linear.size() != q.dim()) throw InvalidArgument("sample_gaussian_canonical: dimension mismatch");
  const BandedCholesky chol(q);
  std::vector<double> z = chol.solve_lower(linear);
  for (auto& zi : z) zi += standard_normal(rng);
  return chol.solve_upper(z);
}

/// Gaussian in canonical (information) form: precision and linear term.
struct GaussianCanonical {
  BandedSPD precision;
  std::vector<double> linear;

  std::vector<double> mean() const { return solve(precision, linear); }
  std::vector<double> draw(Rng& rng) const { return sample_gaussian_canonical(precision, linear, rng); }
};

/// Prior precision of a path whose extended k-th differences are independent N(0, e^{v_t}):
/// D' diag(e^{-v}) D, with D the extended (levels-first) difference operator. Bandwidth k.
inline BandedSPD build_Qv(std::span<const double> v, int k) {
  const std::size_t n = v.size();
  const DifferenceOperator op(n, k);
  const auto& c = op.stencil();
  const auto kk = static_cast<std::size_t>(k);
  BandedSPD q(n, kk);
  for (std::size_t r = 0; r < kk; ++r) q.add(r, r, std::exp(-v[r]));
  for (std::size_t r = kk; r < n; ++r) {
    const double w = std::exp(-v[r]);
    const std::size_t base = r - kk;
    for (std::size_t a = 0; a <= kk; ++a)
      for (std::size_t b = 0; b <= a; ++b) q.add(base + a, base + b, w * c[a] * c[b]);
  }
  return q;
}

/// Precision of v under the AR(phi) prior with innovation precisions xi: A' diag(xi) A, where
/// (A v)_1 = v_1 and (A v)_t = v_t - phi v_{t-1}.
inline BandedSPD build_Qxi(std::span<const double> xi, double phi) {
  const std::size_t n = xi.size();
  BandedSPD q(n, 1);
  auto diag = q.band(0);
  auto off = q.band(1);
  for (std::size_t t = 0; t < n; ++t) diag[t] = xi[t] + (t + 1 < n ? phi * phi * xi[t + 1] : 0.0);
  for (std::size_t t = 0; t + 1 < n; ++t) off[t] = -phi * xi[t + 1];
  return q;
}

}  // namespace asv
