#include "wic/errors.hpp"

namespace wic {

ContractViolation::ContractViolation(const std::string& what)
    : std::logic_error(what) {}

ConfigError::ConfigError(const std::string& what) : std::runtime_error(what) {}

void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace wic
