#pragma once

#include <stdexcept>
#include <string>

namespace aopinn {

/// Invalid input or configuration detected before any computation starts.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A required input (e.g. pseudo-data for a weighted compartment) is missing.
class ConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Division by a (near-)zero observed quantity.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// NaN/Inf encountered, integration blew up, or training diverged.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bounded computation (e.g. S-pair budget) ran out of budget.
class CappedComputation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aopinn
