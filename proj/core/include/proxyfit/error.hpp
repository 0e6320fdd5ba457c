#pragma once

#include <stdexcept>
#include <string>

namespace proxyfit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input failed a documented invariant (model file, camera, config...).
// The CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace proxyfit
