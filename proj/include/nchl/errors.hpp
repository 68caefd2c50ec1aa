#pragma once

#include <stdexcept>
#include <string>

namespace nchl {

// Input vector length does not match a layer or environment dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A genome of the wrong encoding scheme was handed to an operation.
class SchemeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Run configuration failed validation. `field` names the offending key path
// (e.g. "init.mode") so the CLI can report it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace nchl
