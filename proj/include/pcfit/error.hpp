#pragma once

#include <stdexcept>
#include <string>

namespace pcfit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values, unknown keys, or malformed parameter sets.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input images and data files.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Phantom specs that violate their bounds.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Brute-force grids that are too large to enumerate.
class GridError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed; indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcfit
