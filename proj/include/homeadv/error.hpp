#pragma once

#include <stdexcept>
#include <string>

namespace homeadv {

// Malformed or inconsistent input data (files, records, calendars).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric failure: divergence, non-finite values, degenerate variance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments supplied by the caller.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace homeadv
