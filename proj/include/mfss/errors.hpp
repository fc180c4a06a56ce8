#pragma once

#include <stdexcept>
#include <string>

namespace mfss {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent dimensions, aggregation longer than the lag order, bad weights.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Ragged edge that is not monotone, or too few balanced leading periods.
class PatternError : public Error {
 public:
  using Error::Error;
};

// A builder was asked for a formulation that is invalid at the given period.
class FormulationError : public Error {
 public:
  using Error::Error;
};

class SingularInnovationError : public Error {
 public:
  SingularInnovationError(long period, double condition)
      : Error("innovation covariance F_t is singular or ill-conditioned at t=" +
              std::to_string(period) + " (condition estimate " +
              std::to_string(condition) + ")"),
        period_(period),
        condition_(condition) {}

  long period() const noexcept { return period_; }
  double condition() const noexcept { return condition_; }

 private:
  long period_;
  double condition_;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

class OracleTooLargeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfss
