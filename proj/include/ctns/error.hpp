#pragma once

#include <stdexcept>
#include <string>

namespace ctns {

/// Invalid input to an operation: bad parameters, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step could not be taken; carries the simulation time at which the
/// run was aborted.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// |u| dt / h exceeded the configured guard.
class CflViolation : public StepError {
 public:
  using StepError::StepError;
};

/// Non-finite values appeared in the discrete solution.
class BlowUp : public StepError {
 public:
  using StepError::StepError;
};

}  // namespace ctns
