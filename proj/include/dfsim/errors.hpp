#pragma once

#include <stdexcept>
#include <string>

namespace dfsim {

/// Base class for all errors raised by the simulator.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  /// Short machine-readable category ("config", "validation", ...).
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class UndefinedError : public Error {
 public:
  explicit UndefinedError(const std::string& what) : Error("undefined", what) {}
};

class OracleMismatch : public Error {
 public:
  explicit OracleMismatch(const std::string& what) : Error("oracle", what) {}
};

}  // namespace dfsim
