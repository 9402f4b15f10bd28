#pragma once
#include <stdexcept>
#include <string>

namespace defsurv {

// Raised when a primitive op is evaluated outside its numeric domain
// (log of a non-positive value, reciprocal of zero, ...). Carries the op name.
class NumericDomainError : public std::runtime_error {
 public:
  NumericDomainError(std::string op, const std::string& detail)
      : std::runtime_error(op + ": " + detail), op_(std::move(op)) {}
  const std::string& op() const { return op_; }

 private:
  std::string op_;
};

class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& detail) : std::invalid_argument(detail) {}
};

// Malformed or version-incompatible files.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& detail) : std::runtime_error(detail) {}
};

// Training aborted after repeated non-finite objective estimates.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& detail) : std::runtime_error(detail) {}
};

}  // namespace defsurv
