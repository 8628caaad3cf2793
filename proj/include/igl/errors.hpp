#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace igl {

// Root of every error the library throws. Callers that only care about
// "input was bad" versus "numerics went wrong" can catch the two branches.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public InputError {
 public:
  using InputError::InputError;
};

class BoundViolation : public InputError {
 public:
  BoundViolation(std::size_t row, std::size_t col)
      : InputError("lower bound exceeds upper bound at (" + std::to_string(row) + ", " +
                   std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class NonFiniteEntry : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientSamples : public InputError {
 public:
  using InputError::InputError;
};

class InvalidConfig : public InputError {
 public:
  using InputError::InputError;
};

class NonPositiveLambda : public InvalidConfig {
 public:
  using InvalidConfig::InvalidConfig;
};

class EmptyPanel : public InputError {
 public:
  using InputError::InputError;
};

class MalformedRow : public InputError {
 public:
  MalformedRow(std::size_t line, const std::string& why)
      : InputError("malformed row at line " + std::to_string(line) + ": " + why), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonPositiveOpen : public InputError {
 public:
  using InputError::InputError;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FactorizationFailure : public SingularMatrix {
 public:
  using SingularMatrix::SingularMatrix;
};

// A Schur complement went non-positive during a column update. The dual
// iterates are PD by construction, so this always indicates a bug or
// catastrophic roundoff.
class NumericalBreakdown : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace igl
