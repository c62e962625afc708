#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sigc {

// Root of every error raised by the library. Callers that only care about
// "bad input vs. everything else" can catch ValidationError.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input does not satisfy an operation's contract. Maps to HTTP 422 and CLI
// exit code 1.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
  ValidationError(const std::string& what, std::vector<std::string> issues)
      : Error(what), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidBandError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InputTooShortError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PairingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical: rank-deficient design matrix, singular correlation matrix.
class SingularityError : public Error {
 public:
  using Error::Error;
};

}  // namespace sigc
