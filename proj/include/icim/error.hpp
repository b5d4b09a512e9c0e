#pragma once

#include <stdexcept>
#include <string>

namespace icim {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A transform was evaluated outside the strip where it converges.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An exact evaluation would exceed its configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure stopped before meeting its tolerance. The best
/// estimate reached so far is kept so callers can decide whether to use it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double partial_estimate)
      : Error(what), partial_(partial_estimate) {}

  double partial_estimate() const noexcept { return partial_; }

 private:
  double partial_;
};

}  // namespace icim
