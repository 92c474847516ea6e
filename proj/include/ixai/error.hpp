#pragma once

#include <stdexcept>
#include <string>

namespace ixai {

// Bad input from the caller: missing files, malformed config, invalid values.
// The CLI maps these to exit code 2.
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The host environment refused something (port in use, unwritable output).
// The CLI maps these to exit code 3.
class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not produce a valid result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ixai
