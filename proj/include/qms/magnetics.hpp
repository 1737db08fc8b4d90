#pragma once
// Sensing chain: Hall coefficients, varactor capacitance and RF interference.
#include "qms/device.hpp"
#include "qms/gaussian.hpp"

#include <array>
#include <utility>

namespace qms {

/// Normalised Hall-sensor voltages of one pair, each clamped to [0, 1].
struct FieldCoefficients {
  double v_h1 = 0.0;
  double v_h2 = 0.0;

  FieldCoefficients() = default;
  FieldCoefficients(double h1, double h2);
};

struct VaractorModel {
  double c_nominal = 120e-12;             // F
  double parasitic_inductance = 82.5e-12; // H
  double series_resistance = 0.0;         // ohm; carried for completeness, not used by c_eff

  double self_resonance() const;  // Hz
  void validate() const;
};

/// Linear map [0, 1] -> [c_vs_min, c_vs_max]. Out-of-range input is clamped
/// with a warning.
double hall_to_varactor(double v_h, const PhysicalParams& params);

/// Series-LC effective capacitance C / (1 - (2 pi f)^2 L_E C). Negative in the
/// inductive regime; throws Resonance when the denominator vanishes.
double varactor_rf_capacitance(const VaractorModel& model, double f_ext);

/// (V_H1m, V_H2m) with V_H1m = clamp(V_H1 (1 + cos(phase) cos(theta))) and
/// V_H2m = 1 - V_H1m.
std::pair<double, double> rf_modified_coefficients(double v_h1, double theta_ext_deg, double phase);
double rf_modified_coefficient(double v_h1, double theta_ext_deg, double phase);

inline constexpr std::array<double, 4> kRfPhases{0.0, 1.5707963267948966, 3.141592653589793,
                                                 4.71238898038469};

struct RfSample {
  double phase = 0.0;
  double v_h1m = 0.0, v_h2m = 0.0;
  double c_eff_s = 0.0, c_eff_i = 0.0;  // F
  bool inductive = false;
  SphResult sph;
};

struct RfVerdict {
  bool destroyed = false;
  std::array<RfSample, 4> samples{};
  int evaluated = 0;  // samples actually run through the pipeline
};

/// Quasi-static RF disturbance test. f_ext = 0 is the unperturbed baseline;
/// otherwise the coefficients are modulated at the four sampled phases and
/// each side's varactor is replaced by its effective capacitance. Destroyed
/// when any sample is separable or a varactor is inductive.
RfVerdict rf_disturbance(const PhysicalParams& params, const FieldCoefficients& field, double f_ext,
                         double theta_ext_deg, const VaractorModel& model = {});
bool rf_disturbance_verdict(const PhysicalParams& params, const FieldCoefficients& field,
                            double f_ext, double theta_ext_deg, const VaractorModel& model = {});

}  // namespace qms
