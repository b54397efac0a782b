#pragma once

#include <stdexcept>
#include <string>

namespace rcd {

// Validation failures: bad arguments, malformed files, out-of-box designs.
// CLI maps these to exit code 1.
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failures: trim divergence, Riccati blow-up, non-stabilizable
// pairs, queries leaving the aero table. CLI maps these to exit code 2.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrimFailure : NumericalError {
  TrimFailure(const std::string& msg, double residual)
      : NumericalError(msg), residual_norm(residual) {}
  double residual_norm;
};

struct SaturatedTrim : NumericalError {
  explicit SaturatedTrim(const std::string& msg) : NumericalError(msg) {}
};

struct OutOfDomain : NumericalError {
  explicit OutOfDomain(const std::string& msg) : NumericalError(msg) {}
};

struct SolverError : NumericalError {
  explicit SolverError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace rcd
