#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace fockflow {

/// Compact %g rendering of a double for diagnostics.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (polynomial text, config files, flag values).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : InputError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Operands live on different bases or have inconsistent lengths.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested basis or enumeration would exceed the configured size budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain allowed by an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failures: non-convergence, gap collapse, norm drift.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace fockflow
