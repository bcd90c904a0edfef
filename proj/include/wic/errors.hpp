#pragma once

#include <stdexcept>
#include <string>

namespace wic {

// Raised when a caller breaks an operation's precondition (bad state, wrong
// dimension, out-of-range skill, empty batch).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what);
};

// Raised for invalid user-supplied configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what);
};

// Throws ContractViolation with `message` unless `condition` holds.
void require(bool condition, const std::string& message);

}  // namespace wic
