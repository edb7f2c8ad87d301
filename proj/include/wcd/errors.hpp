#ifndef WCD_ERRORS_HPP
#define WCD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace wcd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (duplicate ids, unknown persons, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed knowledge or configuration text. Line and column are 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ValidationError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// No world consistent with the bucketization satisfies the knowledge.
class InconsistentKnowledge : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured budget. Carries the size that was
/// requested so callers can shrink the instance.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, boost::multiprecision::mpz_int requested)
      : Error(what + " (requested " + requested.str() + ")"), requested_(std::move(requested)) {}

  const boost::multiprecision::mpz_int& requested() const noexcept { return requested_; }

 private:
  boost::multiprecision::mpz_int requested_;
};

}  // namespace wcd

#endif  // WCD_ERRORS_HPP
