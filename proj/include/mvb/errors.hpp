#pragma once

#include <stdexcept>
#include <string>

namespace mvb {

/// A caller violated a documented precondition (bad shapes, invalid
/// parameter ranges, mismatched tangent base points).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// A numerical operation left its valid domain (factorization failure,
/// non-finite intermediate).  CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A retraction step produced a point that fails the manifold invariant at
/// floating-point precision.  Callers may halve the step and retry.
class StepRejected : public NumericalError {
 public:
  explicit StepRejected(const std::string& what) : NumericalError(what) {}
};

/// Configuration / input-file problem.  CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mvb
