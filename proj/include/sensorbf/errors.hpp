#pragma once

#include <stdexcept>

namespace sensorbf {

/// A documented precondition of an operation does not hold for its input.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not conform (e.g. H_i is not M x N_i).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The input lies outside the mathematical domain of the operation, such as
/// an indefinite matrix handed to a PSD-only routine or an infeasible start.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Floating-point breakdown (singular factorization, monotonicity violated
/// beyond tolerance, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid scenario configuration or malformed configuration text.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace sensorbf
