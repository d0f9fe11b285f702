#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qqcm {

// Bad input: negative times, malformed configs, unsupported combinations.
// The CLI maps this family to exit code 1.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedDistributionPair : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// Raised when a stationary waiting-time law is requested for r >= 1.
class NoStationaryDistribution : public ArgumentError {
 public:
  explicit NoStationaryDistribution(double r)
      : ArgumentError("no stationary distribution: utilization r = " + std::to_string(r) +
                      " >= 1"),
        utilization(r) {}
  double utilization;
};

// Numerical failure inside a computation (exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::size_t iters, double residual)
      : NumericalError(what + " (iterations=" + std::to_string(iters) +
                       ", last residual=" + std::to_string(residual) + ")"),
        iterations(iters),
        last_residual(residual) {}
  std::size_t iterations;
  double last_residual;
};

class AmbiguousFixedPoint : public NumericalError {
 public:
  explicit AmbiguousFixedPoint(std::size_t dim)
      : NumericalError("fixed point is not unique: eigenvalue-1 eigenspace has dimension " +
                       std::to_string(dim)),
        eigenspace_dimension(dim) {}
  std::size_t eigenspace_dimension;
};

}  // namespace qqcm
