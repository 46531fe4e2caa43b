#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input that cannot define a state, e.g. an all-zero parameter vector.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant beyond numerical tolerance.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The measurement operators do not determine the state uniquely.
class IncompleteMeasurementError : public Error {
 public:
  using Error::Error;
};

/// Linear inversion produced no admissible nuisance scale.
class InversionFailure : public Error {
 public:
  using Error::Error;
};

/// A mean count vanishes while its derivative does not.
class UnboundedInformationError : public Error {
 public:
  using Error::Error;
};

/// No Hermitian L solves the SLD equation for the requested direction.
class InconsistentDirectionError : public Error {
 public:
  using Error::Error;
};

/// Too many trials of a Monte Carlo sweep failed to produce an estimate.
class SweepFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace qse
