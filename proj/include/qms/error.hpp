#pragma once

#include <stdexcept>
#include <string>

namespace qms {

enum class ErrorCode {
  InvalidArgument,
  SymmetryViolation,
  Unphysical,
  SolverFailure,
  Unstable,
  NumericalFailure,
  Resonance,
  Inconsistency,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for the library. `stage` names the pipeline step that
/// raised it (empty outside the entanglement pipeline).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::string stage = {})
      : std::runtime_error(stage.empty() ? what : stage + ": " + what),
        code_(code),
        stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

/// Newton iteration did not converge; carries the last residual.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double last_residual, int iterations)
      : Error(ErrorCode::SolverFailure, what),
        last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace qms
