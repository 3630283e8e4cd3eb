#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csmmab {

enum class ErrorKind {
  invalid_scenario,
  contract_violation,
  domain,
  startup_timeout,
  budget_exceeded,
  io,
  usage,
};

/// Every failure the library reports. The kind drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

std::string_view to_string(ErrorKind kind) noexcept;

}  // namespace csmmab
