#include "qbd/error.hpp"

namespace qbd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonStochastic: return "NonStochastic";
    case ErrorKind::SingularStructure: return "SingularStructure";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotPositiveRecurrent: return "NotPositiveRecurrent";
    case ErrorKind::NotCentered: return "NotCentered";
    case ErrorKind::InvalidPerturbation: return "InvalidPerturbation";
    case ErrorKind::InvalidUniformization: return "InvalidUniformization";
    case ErrorKind::InvalidModel: return "InvalidModel";
  }
  return "Error";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonStochastic:
    case ErrorKind::DomainError:
    case ErrorKind::InvalidPerturbation:
    case ErrorKind::InvalidUniformization:
    case ErrorKind::InvalidModel:
      return true;
    default:
      return false;
  }
}

}  // namespace qbd
