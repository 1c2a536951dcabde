#pragma once

#include <stdexcept>
#include <string>

namespace tdjsarc {

// Invalid or incomplete configuration. `path` names the offending field,
// e.g. "scenario.N".
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Caller broke an operation's precondition (masked action, bad schedule, ...).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Worst-case geometry could not be resolved (negative discriminant).
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Parameter validation failure outside of config parsing.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tdjsarc
