#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace thinhom {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  CapacityError(const std::string& msg, long required_cells, long cap)
      : Error(msg), required_cells(required_cells), cap(cap) {}

  long required_cells;
  long cap;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations(std::move(violations)) {}

  std::vector<std::string> violations;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) {
      out += "\n  - " + s;
    }
    return out;
  }
};

}  // namespace thinhom
