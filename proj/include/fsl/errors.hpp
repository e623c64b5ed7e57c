#pragma once

#include <stdexcept>
#include <string>

namespace fsl {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, inconsistent dimensions, invalid parameters.
struct ConfigError : Error {
  using Error::Error;
};

// A nonlinear or linear solver failed to converge.
struct SolverError : Error {
  using Error::Error;
};

// Eigenvalue computations failed or returned something structurally wrong
// (e.g. a multiple eigenvalue where a simple one is required).
struct SpectrumError : Error {
  using Error::Error;
};

// The perturbation left the range of validity of the front decomposition
// (shift too large, projection denominator too close to zero, ...).
struct DecompositionError : Error {
  using Error::Error;
};

// Time integration produced NaN/Inf.  t_last is the last finite time.
struct BlowUpError : Error {
  double t_last;
  BlowUpError(const std::string& msg, double t) : Error(msg), t_last(t) {}
};

// File / serialization problems.
struct IoError : Error {
  using Error::Error;
};

}  // namespace fsl
