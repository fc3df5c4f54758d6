#pragma once

#include <stdexcept>
#include <string>

namespace modeinv {

/// Base of every error raised by the toolkit. The CLI maps subclasses onto
/// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected physical parameter or malformed configuration (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not meet its contract (exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : NumericalError(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// The argument of the principal logarithm left the safe half-plane.
class BranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The perturbative validity estimator rejects the parameters (exit code 3).
class ValidityError : public Error {
 public:
  using Error::Error;
};

}  // namespace modeinv
