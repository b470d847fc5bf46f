#pragma once

#include <stdexcept>
#include <string>

namespace rsma {

/// Scenario/sweep configuration rejected: parse failure or invariant
/// violation. The message names the offending key or file location.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure, carries the path involved.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rsma
