#pragma once
// Run configuration: JSON document -> validated RunConfig and back.
#include "qms/device.hpp"
#include "qms/dynamics.hpp"
#include "qms/magnetics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qms {

enum class SweepVariable { DetuningRatio, Temperature, Chi2, FExt, FieldAngle, VH1 };
enum class RunMode { Sweep, Compass };

const char* to_string(SweepVariable v);
const char* to_string(DetuningNormalization v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::DetuningRatio;
  double lo = -2.0;
  double hi = 2.0;
  int points = 201;
  std::vector<double> values;  // explicit list; overrides lo/hi/points when non-empty

  std::vector<double> grid() const;
};

/// Optional inner detuning scan: each row then reports the minimum of lambda
/// over this grid instead of a single detuning.
struct DetuningScan {
  double lo = -2.0;
  double hi = 2.0;
  int points = 0;  // 0 disables the scan

  std::vector<double> grid() const;
};

struct CompassSpec {
  int pair_count = 36;
  double b_ref = 0.01;       // T
  double field_angle = 0.0;  // degrees
  double magnitude = 0.01;   // T
};

struct RunConfig {
  RunMode mode = RunMode::Sweep;
  PhysicalParams params;
  VaractorModel varactor;
  FieldCoefficients field{0.99, 0.01};
  SweepSpec sweep;
  DetuningScan detuning_scan;
  DetuningNormalization normalization = DetuningNormalization::Mechanical;
  double detuning_ratio = 0.0;   // used when detuning is not the swept variable
  double f_ext = 0.0;            // Hz
  double theta_ext = 73.0;       // degrees
  double field_magnitude = 0.01; // T, for field_angle sweeps
  double b_ref = 0.01;           // T, for field_angle sweeps
  CompassSpec compass;
  std::string output;
  std::uint64_t seed = 0;
  int threads = 0;
  bool emit_timing = false;
  std::string calibration;  // path of the overlay actually applied, as written

  void validate() const;
};

/// Parses a JSON document. Empty text yields defaults. Unknown keys, wrong
/// types and out-of-range values throw Error(Config) naming the JSON pointer.
/// A "calibration" key names a JSON file (relative to base_dir) whose
/// "params" object is applied before the document's own "params".
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Full document with every field spelled out (calibration already merged).
std::string serialize_config(const RunConfig& config);

/// Applies a JSON "params" object onto params; same key rules as parse_config.
void apply_params_json(const std::string& json_text, PhysicalParams& params,
                       const std::string& location = "/params");

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace qms
