#include "csmmab/error.hpp"

namespace csmmab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_scenario: return "invalid-scenario";
    case ErrorKind::contract_violation: return "contract-violation";
    case ErrorKind::domain: return "domain";
    case ErrorKind::startup_timeout: return "startup-timeout";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

}  // namespace csmmab
