#pragma once

#include <stdexcept>
#include <string>

namespace fairlr {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of inputs do not line up (weights vs. columns, predictions vs. rows).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a documented invariant (non-finite values, non-binary
/// labels, a missing group, malformed CSV cells).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is out of range or a config document is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The linear constraint set admits no point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairlr
