#pragma once

#include <stdexcept>
#include <string>

namespace sweep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector or grid has the wrong size for the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation
/// (empty point sets, empty shapes, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A primitive whose axis is degenerate (zero-length derivative that no
/// secant fallback can repair).
class InvalidPrimitive : public Error {
 public:
  using Error::Error;
};

/// A parameter value lies outside its admissible range.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The optimizer produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sweep
