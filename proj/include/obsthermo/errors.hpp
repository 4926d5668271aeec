#pragma once

#include <stdexcept>

namespace obsthermo {

/// Raised when inputs violate a documented precondition (bad dimensions,
/// non-Hermitian operators where Hermitian ones are required, malformed
/// configuration, ...).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation leaves the numerically trustworthy regime:
/// effective states with genuinely negative eigenvalues, diverged
/// optimizations, singular SLD solves.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace obsthermo
