#pragma once

#include <stdexcept>
#include <string>

namespace regsamp {

/// Input violated a documented precondition (bad flag, malformed row,
/// infeasible scheme). Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// File could not be opened, read or written. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace regsamp
