#pragma once

#include <stdexcept>
#include <string>

namespace rimex {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. |mu| > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (bad counts, tolerances, boundary data, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mismatched lengths or other caller-side contract violations.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A moment vector that was required to be realizable is not.
class NotRealizableError : public Error {
 public:
  using Error::Error;
};

/// exp(b^T alpha) left the representable range of double.
class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace rimex
