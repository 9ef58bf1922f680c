#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lfdrshrink {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The posterior mean does not exist (df <= 1).
class UndefinedMeanError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Iterative numerical procedure failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// invert_monotone: the bracket does not straddle the target.
class BracketError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Mixture density fit failed (IRLS divergence or non-convergence).
class FitError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Input data cannot support the requested computation (too few
// observations, zero variance, too few features).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed delimiter-separated input. line/column are 1-based, 0 if unknown.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : DataError(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lfdrshrink
