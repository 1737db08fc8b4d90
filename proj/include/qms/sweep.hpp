#pragma once
// Parameter sweeps over the entanglement pipeline and their CSV output.
#include "qms/compass.hpp"
#include "qms/config.hpp"
#include "qms/dynamics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qms {

struct SweepRow {
  double value = 0.0;           // swept variable
  double detuning_ratio = 0.0;  // detuning used (argmin when a detuning scan is active)
  double lambda = 0.0;
  bool entangled = false;
  bool stable = false;
  double fp_residual = 0.0;
  double det_a = 0.0, det_b = 0.0, det_c = 0.0;
  double lyapunov_residual = 0.0;
  std::string status = "ok";  // ok, unstable, solver_failure, numerical_failure, inductive, resonance
  StageTimings timings;
};

/// One pipeline run at fixed field coefficients and detuning ratio.
SweepRow evaluate_row(const PhysicalParams& params, const FieldCoefficients& field, double ratio,
                      DetuningNormalization norm);

/// Minimum lambda over a list of detuning ratios; unstable or failed points
/// are skipped. Status is "ok" when at least one point was evaluated.
SweepRow min_over_detuning(const PhysicalParams& params, const FieldCoefficients& field,
                           const std::vector<double>& ratios, DetuningNormalization norm,
                           int threads = 1);

/// Evaluates one sweep point of a configuration.
SweepRow evaluate_sweep_point(const RunConfig& config, double value);

/// All points in sweep order. threads < 0 uses config.threads.
std::vector<SweepRow> run_sweep(const RunConfig& config, int threads = -1);

/// Shortest decimal text with 17 significant digits ("nan"/"inf" spelled out).
std::string format_double(double v);

void write_sweep_csv(std::ostream& out, const RunConfig& config, const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const RunConfig& config,
                     const std::vector<SweepRow>& rows);
void write_compass_csv(std::ostream& out, const DirectionEstimate& estimate);
void write_compass_csv(const std::filesystem::path& path, const DirectionEstimate& estimate);

/// Compass run described by config.compass.
DirectionEstimate run_compass(const RunConfig& config, int threads = -1);

}  // namespace qms
