#pragma once

#include <stdexcept>
#include <string>

namespace curate {

// Base for every fatal error the library raises. Per-record problems are
// reported as values instead (see RecordError, Rejection).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration problems; the CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace curate
