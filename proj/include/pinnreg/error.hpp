#pragma once

#include <stdexcept>
#include <string>

namespace pinnreg {

/// Malformed configuration, missing input files or inconsistent arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, solver instability, failed convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or arity mismatch between arguments.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested derivative the engine does not provide.
class UnsupportedOrder : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A jet consumer asked for a partial the batch does not carry.
class MissingPartial : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point outside the region an operation is defined on.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pinnreg
