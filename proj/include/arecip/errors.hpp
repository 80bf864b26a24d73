#pragma once

#include <stdexcept>

namespace arecip {

/// Operand outside the domain of an operation (e.g. reciprocal of zero).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Caller violated a documented precondition (e.g. non-one-hot multiplier operand).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration: bad bit width, constant out of range, malformed sweep.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace arecip
