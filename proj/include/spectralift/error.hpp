#pragma once

#include <stdexcept>
#include <string>

namespace spectralift {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or band counts that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range or otherwise invalid configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input that makes the operation undefined (constant cube, zero signal power).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered in data, gradients or losses.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace spectralift
