#pragma once

#include <stdexcept>
#include <string>

namespace neuroacc {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-physical geometry or parameter set (non-positive dimension, Q <= 1, ...).
class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

/// Electrode gap closed during integration; the electrostatic force diverges.
class PullInError : public Error {
 public:
  using Error::Error;
};

/// A state variable left the sane range (|value| > 1 m) — integration blew up.
class NumericOverflowError : public Error {
 public:
  using Error::Error;
};

/// Linear system is singular (e.g. ridge solve with gamma = 0 on rank-deficient states).
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Matrix/vector shapes do not agree.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// A normalization needed a non-zero variance and did not get one.
class ZeroVarianceError : public Error {
 public:
  using Error::Error;
};

/// A generated target sequence diverged (|y| above the guard threshold).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration file or unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace neuroacc
