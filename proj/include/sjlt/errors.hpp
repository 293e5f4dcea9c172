#pragma once

#include <stdexcept>
#include <string>

namespace sjlt {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A certification precondition such as the sparsity cap is not met.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

/// Vector length does not match the matrix data dimension.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle would exceed its enumeration budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  version,
  truncated,
  trailing_data,
  entry_count,
  sign_domain,
  duplicate_row,
  row_range,
  header,
  syntax,
};

/// Malformed matrix or vector stream.
class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string &what)
      : Error(what), kind_(kind) {}

  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace sjlt
