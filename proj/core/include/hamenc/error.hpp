#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hamenc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset or model text. Carries the 1-based line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes disagree.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// NaN or infinity where a finite value is required.
class NumericError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The operation is not defined for this configuration.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// File system or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hamenc
