#pragma once

#include <stdexcept>
#include <string>

namespace opde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Tensor or matrix dimensions do not match what the operation expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Input data is missing, malformed or unusable (I/O, parsing, empty scenes).
class DataError : public Error {
 public:
  using Error::Error;
};

/// The crop around an initial pose contains no points, so the pose is unusable.
class EmptyCropError : public DataError {
 public:
  using DataError::DataError;
};

/// NaN/Inf encountered in scores, losses or gradients.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace opde
