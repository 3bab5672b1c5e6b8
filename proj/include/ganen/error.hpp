#pragma once

#include <stdexcept>
#include <string>

namespace ganen {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration detected before any compute.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (checkpoint, dataset, instance, config).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared in a loss, gradient or parameter.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ganen
