#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or malformed configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine produced a non-finite or otherwise unusable value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization hit a non-positive pivot at `index` (0-based leading minor).
class NotPositiveDefinite : public NumericError {
 public:
  NotPositiveDefinite(std::size_t index, double pivot)
      : NumericError("matrix is not positive definite: leading minor " + std::to_string(index + 1) +
                     " has pivot " + std::to_string(pivot)),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A Gibbs sweep left the chain in a non-finite state.
class DivergenceError : public NumericError {
 public:
  DivergenceError(std::size_t iteration, std::string block, const std::string& detail = {})
      : NumericError("chain diverged at iteration " + std::to_string(iteration) + " in block '" + block +
                     "'" + (detail.empty() ? std::string{} : ": " + detail)),
        iteration_(iteration),
        block_(std::move(block)) {}

  std::size_t iteration() const noexcept { return iteration_; }
  const std::string& block() const noexcept { return block_; }

 private:
  std::size_t iteration_;
  std::string block_;
};

}  // namespace asv
