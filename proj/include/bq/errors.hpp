#pragma once

#include <stdexcept>
#include <string>

namespace bq {

/// Argument outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix singular to working precision (e.g. a pole of a determinant functional).
class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace bq
