#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dtq {

/// Caller violated a documented precondition (bad sizes, n < d, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request exceeds a fixed capacity, e.g. truth tables beyond the brute-force cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed tree text. `where()` is a byte offset for syntax errors or a
/// JSON pointer for schema errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::string where)
      : std::runtime_error(what + " at " + where), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace dtq
