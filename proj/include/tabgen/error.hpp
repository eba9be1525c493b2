#pragma once

#include <stdexcept>
#include <string>

namespace tabgen {

// Base for all errors raised by the library. Callers at the CLI boundary map
// ConfigError to exit status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Benchmark or table content that violates a schema or gold invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string instance_id, const std::string& reason)
      : Error(instance_id.empty() ? reason : instance_id + ": " + reason),
        instance_id_(std::move(instance_id)) {}

  const std::string& instance_id() const noexcept { return instance_id_; }

 private:
  std::string instance_id_;
};

}  // namespace tabgen
