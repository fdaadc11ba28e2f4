#pragma once

#include <stdexcept>
#include <string>

namespace nsdc {

/// Raised when a study configuration file is malformed or inconsistent.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a time integration cannot be completed, e.g. a Newton
/// iteration that fails to converge even after step-size reduction.
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nsdc
