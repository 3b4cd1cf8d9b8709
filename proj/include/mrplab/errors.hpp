#pragma once

#include <stdexcept>
#include <string>

namespace mrplab {

// Base for every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller-side mistakes: unknown names, violated preconditions, bad parameters.
class UsageError : public Error {
 public:
  using Error::Error;
};

class UnknownStateError : public UsageError {
 public:
  explicit UnknownStateError(const std::string& name)
      : UsageError("unknown state '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class PreconditionError : public UsageError {
 public:
  using UsageError::UsageError;
};

class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: singular systems, runaway trajectories, enumeration blow-up.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepCapExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CyclicSpecError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EnumerationCapExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InfeasibleMarginalsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UndefinedEstimateError : public Error {
 public:
  explicit UndefinedEstimateError(const std::string& name)
      : Error("no data for state '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class TooFewSamplesError : public UsageError {
 public:
  using UsageError::UsageError;
};

class DegenerateAdvantageError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mrplab
