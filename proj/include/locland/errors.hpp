#pragma once

#include <stdexcept>
#include <string>

namespace locland {

/// Bad arguments or violated preconditions detected up front.
class InvalidInputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Shape disagreement between an operator and its operand.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Failure discovered mid-computation: breakdown, non-convergence,
/// an iterate that vanished, or an imaginary residue above tolerance.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File and format problems.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace locland
