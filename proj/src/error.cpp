#include "qms/error.hpp"

namespace qms {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::SymmetryViolation: return "symmetry_violation";
    case ErrorCode::Unphysical: return "unphysical";
    case ErrorCode::SolverFailure: return "solver_failure";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::NumericalFailure: return "numerical_failure";
    case ErrorCode::Resonance: return "resonance";
    case ErrorCode::Inconsistency: return "inconsistency";
    case ErrorCode::Config: return "config_error";
    case ErrorCode::Io: return "io_error";
  }
  return "unknown";
}

}  // namespace qms
