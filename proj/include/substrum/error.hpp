#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace substrum {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed substitution text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// An input does not satisfy the mathematical precondition of an operation.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured memory or time budget would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Root enclosures could not be separated at the maximum working precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

}  // namespace substrum
