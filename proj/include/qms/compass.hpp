#pragma once
// Ring of sensor pairs used as a field-direction compass.
#include "qms/device.hpp"
#include "qms/dynamics.hpp"
#include "qms/gaussian.hpp"
#include "qms/magnetics.hpp"

#include <string>
#include <vector>

namespace qms {

struct SensorArray {
  std::vector<double> pair_angles;  // radians, strictly increasing in [0, 2 pi)
  double b_ref = 0.01;              // field magnitude mapped to full scale, T

  static SensorArray uniform(int pair_count = 36, double b_ref = 0.01);
  int pair_count() const { return static_cast<int>(pair_angles.size()); }
  double spacing() const;  // mean angular spacing
  void validate() const;
};

/// Cosine projection of a field (direction theta_b, given magnitude) onto the
/// pair oriented at pair_angle.
FieldCoefficients project_field(double theta_b, double magnitude, double pair_angle, double b_ref);

struct PairReading {
  int index = 0;
  double angle = 0.0;
  FieldCoefficients field;
  bool stable = false;
  SphResult sph;
  std::string status = "ok";  // ok, unstable, solver_failure, numerical_failure
};

struct DirectionEstimate {
  bool detected = false;
  double angle = 0.0;             // radians in [0, 2 pi); valid when detected
  std::vector<int> entangled_pairs;
  double effective_width = 0.0;   // angular span of the entangled set
  std::vector<PairReading> pairs; // one per pair, in index order
};

/// Circular mean of angles, in [0, 2 pi).
double circular_mean(const std::vector<double>& angles);

/// Runs the entanglement pipeline on every pair (in parallel) and locates the
/// field. A zero field is never detected. Throws Inconsistency when the
/// entangled pairs do not form one contiguous arc.
/// With `norm` Microwave the detuning ratio is applied per pair against that
/// pair's LC resonances; otherwise params' detunings are used as given.
DirectionEstimate estimate_direction(const SensorArray& array, double theta_b, double magnitude,
                                     const PhysicalParams& params, int threads = 0,
                                     DetuningNormalization norm = DetuningNormalization::Mechanical,
                                     double detuning_ratio = 0.0);

}  // namespace qms
