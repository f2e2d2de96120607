#pragma once

#include <stdexcept>
#include <string>

namespace hullkit {

// Error classes map onto CLI exit codes: validation -> 2,
// numerical -> 3, I/O -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Evaluation point too close to (or outside) the declared domain.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Disc rejected because |f'| degenerates somewhere on the closed disc.
class BranchPointError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace hullkit
