#pragma once

#include <stdexcept>
#include <string>

namespace critsys {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input rejected before any computation ran (bad dimensions, out-of-range
/// parameters, malformed text). The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation started but could not produce a trustworthy result.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedObservable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PoleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Raised for instances outside the supported class, e.g. a rational
/// function whose poles are not rational numbers.
class UnsupportedInstance : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ValidationError(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Trajectory left the region |x_i| <= 1e12 or became non-finite.
class EscapeError : public NumericalError {
 public:
  EscapeError(const std::string& what, double last_finite_time)
      : NumericalError(what), last_finite_time_(last_finite_time) {}
  double last_finite_time() const noexcept { return last_finite_time_; }

 private:
  double last_finite_time_;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ExtractionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace critsys
