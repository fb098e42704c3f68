#pragma once

#include <stdexcept>
#include <string>

namespace fhelm {

// Base of every error thrown by the library. The CLI maps the first three
// kinds to exit status 2 and the rest to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong call shape: mismatched grids, wrong space tag, empty family.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Parameters that are valid mathematically but cannot be resolved on the grid,
// or a configuration that violates a stated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iteration failed a runtime certificate (non-contraction, stagnation).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::string diagnostic = {})
      : Error(what), diagnostic_(std::move(diagnostic)) {}
  const std::string& diagnostic() const { return diagnostic_; }

 private:
  std::string diagnostic_;
};

// No endpoint with negative energy was found, so the mountain-pass geometry
// cannot be certified.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// A computed object failed an independent consistency check.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace fhelm
