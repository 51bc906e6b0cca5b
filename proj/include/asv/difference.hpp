#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "asv/error.hpp"

namespace asv {

/// Coefficients of the k-th difference stencil, oldest first: k=1 (-1, 1), k=2 (1, -2, 1), k=3 (-1, 3, -3, 1).
inline std::vector<double> difference_stencil(int k) {
  std::vector<double> c{1.0};
  for (int r = 0; r < k; ++r) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] -= c[i];
      next[i + 1] += c[i];
    }
    c = std::move(next);
  }
  return c;
}

/// k-th order differencing on length-T vectors.
///
/// `apply` returns the T-k proper differences. The extended form prepends the k initial levels
/// (x_1..x_k) so that it is a unit lower-triangular T x T map; `reconstruct` is its inverse, the
/// cumulative-sum ("un-differencing") operator.
class DifferenceOperator {
 public:
  DifferenceOperator(std::size_t length, int order) : length_(length), order_(order) {
    if (order < 1 || order > 3) throw InvalidArgument("differencing order must be in 1..3");
    if (length <= static_cast<std::size_t>(order))
      throw InvalidArgument("series length must exceed the differencing order");
    stencil_ = difference_stencil(order);
  }

  std::size_t length() const noexcept { return length_; }
  int order() const noexcept { return order_; }
  const std::vector<double>& stencil() const noexcept { return stencil_; }

  std::vector<double> apply(std::span<const double> x) const {
    check(x.size());
    const auto k = static_cast<std::size_t>(order_);
    std::vector<double> d(length_ - k);
    for (std::size_t r = 0; r < d.size(); ++r) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= k; ++i) acc += stencil_[i] * x[r + i];
      d[r] = acc;
    }
    return d;
  }

  /// (x_1, ..., x_k, Δ^k x_{k+1}, ..., Δ^k x_T)
  std::vector<double> apply_extended(std::span<const double> x) const {
    check(x.size());
    const auto k = static_cast<std::size_t>(order_);
    std::vector<double> out(length_);
    for (std::size_t r = 0; r < k; ++r) out[r] = x[r];
    for (std::size_t r = k; r < length_; ++r) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= k; ++i) acc += stencil_[i] * x[r - k + i];
      out[r] = acc;
    }
    return out;
  }

  /// Inverse of apply_extended.
  std::vector<double> reconstruct(std::span<const double> extended) const {
    check(extended.size());
    const auto k = static_cast<std::size_t>(order_);
    std::vector<double> x(length_);
    for (std::size_t r = 0; r < k; ++r) x[r] = extended[r];
    // Leading stencil coefficient is 1, so solve the row for its newest entry.
    for (std::size_t r = k; r < length_; ++r) {
      double acc = extended[r];
      for (std::size_t i = 0; i < k; ++i) acc -= stencil_[i] * x[r - k + i];
      x[r] = acc;
    }
    return x;
  }

  std::vector<double> reconstruct(std::span<const double> initial, std::span<const double> diffs) const {
    if (initial.size() != static_cast<std::size_t>(order_) || diffs.size() + initial.size() != length_)
      throw InvalidArgument("reconstruct: need k initial levels and T-k differences");
    std::vector<double> ext(initial.begin(), initial.end());
    ext.insert(ext.end(), diffs.begin(), diffs.end());
    return reconstruct(ext);
  }

  /// Dense (T-k) x T matrix, row-major. Intended for small T.
  std::vector<std::vector<double>> dense() const {
    const auto k = static_cast<std::size_t>(order_);
    std::vector<std::vector<double>> m(length_ - k, std::vector<double>(length_, 0.0));
    for (std::size_t r = 0; r < m.size(); ++r)
      for (std::size_t i = 0; i <= k; ++i) m[r][r + i] = stencil_[i];
    return m;
  }

 private:
  void check(std::size_t n) const {
    if (n != length_) throw InvalidArgument("difference operator length mismatch");
  }

  std::size_t length_;
  int order_;
  std::vector<double> stencil_;
};

inline DifferenceOperator diff_matrix(std::size_t length, int order) { return DifferenceOperator(length, order); }

}  // namespace asv
