#pragma once

#include <stdexcept>
#include <string>

namespace forestflight {

// Invalid parameters, malformed input, violated invariants. The CLI maps
// this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File system failures. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace forestflight
