#pragma once

#include <stdexcept>
#include <string>

namespace alone {

// Every failure raised by the library derives from Error so callers can
// catch one type; the subclasses map onto the CLI exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or indefinite quantities inside an iterative solver.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace alone
