#pragma once

#include <stdexcept>
#include <string>

namespace riskfix {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (non-finite
/// values, sigma <= 0, mu0 not in K, ...). The CLI maps these to exit code 1.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed constraint-set descriptor.
class DescriptorError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Operation not defined for the given constraint kind.
class UnsupportedKindError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A fixed-point equation that has no solution for the given sample size.
class NoSolutionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// File system failures. Exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Unparseable or inconsistent configuration. Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskfix
