#pragma once

#include <stdexcept>
#include <string>

namespace truncld {

/// Bad argument or malformed object (wrong dimension, non-unit direction, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A standing assumption of the model or a theorem's hypothesis does not hold.
/// The command-line runner maps this to exit code 2.
class AssumptionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature or solver failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Monte Carlo run produced no usable information (e.g. zero hits).
class EstimationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[noreturn]] void throw_invalid(const std::string& what);
[[noreturn]] void throw_assumption(const std::string& what);

}  // namespace truncld
