#pragma once
// Drive-amplitude calibration. The device description fixes no drive values,
// so the smallest drives giving large coherent amplitudes are searched, then
// the drive/pump plane is scanned for the most negative lambda.
#include "qms/device.hpp"
#include "qms/dynamics.hpp"
#include "qms/magnetics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qms {

struct CalibrationOptions {
  FieldCoefficients field{0.99, 0.01};
  double min_amplitude = 10.0;         // |A| and |C| lower bound
  double drive_lo = 1e3;               // search bracket for E_c / E_omega
  double drive_hi = 1e14;
  int steps_per_decade = 8;
  std::vector<double> e_omega_factors{1, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};  // multiples of the minimal E_omega
  std::vector<double> e_p0_grid{0, 1, 3, 10, 30, 100, 200, 300, 400, 500};
  std::vector<double> detuning_ratios;  // empty: 201 points on [-2, 2]
  DetuningNormalization normalization = DetuningNormalization::Mechanical;
  int threads = 0;
};

struct CalibrationCandidate {
  double e_omega = 0.0;
  double e_p0 = 0.0;
  double g_int = 0.0;
  double min_lambda = 0.0;
  double argmin_ratio = 0.0;
  int stable_points = 0;
  int total_points = 0;
  double max_abs_det_c = 0.0;
};

struct CalibrationResult {
  PhysicalParams params;   // input params with e_c, e_omega, e_p0 replaced
  double e_c_min = 0.0;
  double e_omega_min = 0.0;
  bool stable_at_defaults = false;
  CalibrationCandidate best;
  bool entangling_point_found = false;
  std::vector<CalibrationCandidate> grid;
  double zero_temperature_min_lambda = 0.0;  // best candidate re-run at T = 0
};

/// Runs the search, writing a human-readable trace to `log` when given.
/// Throws SolverFailure when no drive in the bracket reaches the amplitude bound.
CalibrationResult calibrate(const PhysicalParams& base, const CalibrationOptions& options = {},
                            std::ostream* log = nullptr);

/// JSON document with a "params" object usable as a config overlay.
std::string calibration_json(const CalibrationResult& result);

}  // namespace qms
