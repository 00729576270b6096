#pragma once

#include <stdexcept>
#include <string>

namespace ambc {

/// Invalid scenario or run configuration (bad parameter, unknown tag, ...).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of a function (e.g. p outside (0,1)).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Input that violates a documented precondition (non-Hermitian matrix, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Numerically degenerate input or a failed numerical procedure.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateInput : public NumericalError {
 public:
  explicit DegenerateInput(const std::string& what) : NumericalError(what) {}
};

/// File could not be opened, read or written, or has a malformed layout.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ambc
