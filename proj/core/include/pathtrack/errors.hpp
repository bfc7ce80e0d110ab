#pragma once

#include <stdexcept>
#include <string>

namespace pathtrack {

/// Invalid or inconsistent configuration. The command-line tool maps this to
/// exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure to read or write a data file. The command-line tool maps this to
/// exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pathtrack
