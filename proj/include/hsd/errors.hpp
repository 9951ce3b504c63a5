#pragma once

#include <stdexcept>
#include <string>

namespace hsd {

// Bad input: malformed files, violated preconditions, invalid configuration.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while running an otherwise valid job (diverging loss, I/O).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hsd
