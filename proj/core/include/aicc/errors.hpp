#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aicc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (non-square input, wrong vector length, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Interpolation nodes are not pairwise distinct.
class InvalidNodes : public Error {
 public:
  using Error::Error;
};

/// Fewer worker results than the recovery threshold were supplied.
class InsufficientResults : public Error {
 public:
  InsufficientResults(std::size_t required, std::size_t available)
      : Error("insufficient results: need " + std::to_string(required) +
              ", got " + std::to_string(available) + " (missing " +
              std::to_string(required - available) + ")"),
        required_(required),
        available_(available) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }
  std::size_t missing() const noexcept { return required_ - available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

/// The requested function value is not well defined for this input
/// (e.g. tied dominant eigenvalues).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf showed up where finite values are required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed checkpoint, config file or other serialized input.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace aicc
