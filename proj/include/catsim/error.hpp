#pragma once

#include <stdexcept>
#include <string>

namespace catsim {

/// Invalid input data or configuration (bad CSV row, out-of-range value,
/// inconsistent config). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / stream failure (missing file, unwritable path). Maps to CLI
/// exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace catsim
