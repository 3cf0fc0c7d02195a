#pragma once

#include <stdexcept>
#include <string>

namespace wood {

// Raised when an input violates a documented invariant (bad record, shape
// mismatch, out-of-range config). The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on filesystem or serialization failures. The CLI maps this to exit
// code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wood
