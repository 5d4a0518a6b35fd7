#pragma once

#include <stdexcept>
#include <string>

namespace windfield {

/// Invalid configuration: bad flag values, inconsistent options, malformed
/// config files. Maps to process exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or degenerate input data: malformed CSV, duplicate stations,
/// geometry too degenerate to fit. Maps to process exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside a solver that validation could not catch
/// beforehand. Maps to process exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace windfield
