#pragma once

#include <stdexcept>
#include <string>

namespace qbd {

enum class ErrorKind {
  NonStochastic,
  SingularStructure,
  NoConvergence,
  NotContractive,
  DomainError,
  NotPositiveRecurrent,
  NotCentered,
  InvalidPerturbation,
  InvalidUniformization,
  InvalidModel,
};

const char* to_string(ErrorKind kind);

/// True for kinds caused by bad input (as opposed to a numerical failure).
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qbd
