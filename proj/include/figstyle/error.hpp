#pragma once

#include <stdexcept>
#include <string>

namespace figstyle {

// Runtime failure (exit status 1 at the command line).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid invocation or configuration: bad flags, unknown keys, missing paths (exit 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that violates a documented schema or invariant (exit 3).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace figstyle
