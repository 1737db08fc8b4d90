#include "qms/magnetics.hpp"

#include "qms/constants.hpp"
#include "qms/dynamics.hpp"
#include "qms/error.hpp"
#include "qms/log.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qms {
namespace {

double clamp_unit(double v, const char* what) {
  if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NaN");
  if (v < 0.0 || v > 1.0) {
    const double c = std::clamp(v, 0.0, 1.0);
    log_warning(std::string(what) + " = " + std::to_string(v) + " clamped to " + std::to_string(c));
    return c;
  }
  return v;
}

}  // namespace

FieldCoefficients::FieldCoefficients(double h1, double h2)
    : v_h1(clamp_unit(h1, "v_h1")), v_h2(clamp_unit(h2, "v_h2")) {}

double VaractorModel::self_resonance() const {
  validate();
  return 1.0 / (constants::kTwoPi * std::sqrt(parasitic_inductance * c_nominal));
}

void VaractorModel::validate() const {
  if (!(c_nominal > 0.0) || !std::isfinite(c_nominal)) {
    throw Error(ErrorCode::InvalidArgument, "varactor c_nominal must be positive");
  }
  if (!(parasitic_inductance > 0.0) || !std::isfinite(parasitic_inductance)) {
    throw Error(ErrorCode::InvalidArgument, "varactor parasitic_inductance must be positive");
  }
  if (!(series_resistance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "varactor series_resistance must be non-negative");
  }
}

double hall_to_varactor(double v_h, const PhysicalParams& params) {
  const double v = clamp_unit(v_h, "hall coefficient");
  return params.c_vs_min + (params.c_vs_max - params.c_vs_min) * v;
}

double varactor_rf_capacitance(const VaractorModel& model, double f_ext) {
  model.validate();
  if (!(f_ext >= 0.0) || !std::isfinite(f_ext)) {
    throw Error(ErrorCode::InvalidArgument, "f_ext must be finite and non-negative");
  }
  const double w = constants::kTwoPi * f_ext;
  const double denom = 1.0 - w * w * model.parasitic_inductance * model.c_nominal;
  if (std::abs(denom) < 1e-9) {
    throw Error(ErrorCode::Resonance,
                "f_ext = " + std::to_string(f_ext) + " Hz sits on the varactor self-resonance");
  }
  return model.c_nominal / denom;
}

std::pair<double, double> rf_modified_coefficients(double v_h1, double theta_ext_deg, double phase) {
  const double theta = theta_ext_deg * constants::kTwoPi / 360.0;
  const double raw = v_h1 * (1.0 + std::cos(phase) * std::cos(theta));
  const double h1 = std::clamp(raw, 0.0, 1.0);
  if (h1 != raw) log_info("V_H1m = " + std::to_string(raw) + " clamped to " + std::to_string(h1));
  return {h1, 1.0 - h1};
}

double rf_modified_coefficient(double v_h1, double theta_ext_deg, double phase) {
  return rf_modified_coefficients(v_h1, theta_ext_deg, phase).first;
}

RfVerdict rf_disturbance(const PhysicalParams& params, const FieldCoefficients& field, double f_ext,
                         double theta_ext_deg, const VaractorModel& model) {
  model.validate();
  RfVerdict verdict;
  if (f_ext == 0.0) {
    RfSample& s = verdict.samples[0];
    s.v_h1m = field.v_h1;
    s.v_h2m = field.v_h2;
    s.c_eff_s = hall_to_varactor(field.v_h1, params);
    s.c_eff_i = hall_to_varactor(field.v_h2, params);
    s.sph = mc_entanglement(params, field);
    verdict.evaluated = 1;
    verdict.destroyed = !s.sph.entangled;
    return verdict;
  }

  for (std::size_t k = 0; k < kRfPhases.size(); ++k) {
    RfSample& s = verdict.samples[k];
    s.phase = kRfPhases[k];
    std::tie(s.v_h1m, s.v_h2m) = rf_modified_coefficients(field.v_h1, theta_ext_deg, s.phase);

    VaractorModel side = model;
    side.c_nominal = hall_to_varactor(s.v_h1m, params);
    s.c_eff_s = varactor_rf_capacitance(side, f_ext);
    side.c_nominal = hall_to_varactor(s.v_h2m, params);
    s.c_eff_i = varactor_rf_capacitance(side, f_ext);

    if (s.c_eff_s <= 0.0 || s.c_eff_i <= 0.0) {
      s.inductive = true;
      verdict.destroyed = true;
      continue;
    }
    PointEvaluation point = evaluate_point(params, s.c_eff_s, s.c_eff_i);
    if (!point.stable) {
      throw Error(ErrorCode::Unstable, "drift matrix is not Hurwitz", "stability");
    }
    s.sph = point.sph;
    ++verdict.evaluated;
    if (!s.sph.entangled) verdict.destroyed = true;
  }
  return verdict;
}

bool rf_disturbance_verdict(const PhysicalParams& params, const FieldCoefficients& field,
                            double f_ext, double theta_ext_deg, const VaractorModel& model) {
  return rf_disturbance(params, field, f_ext, theta_ext_deg, model).destroyed;
}

}  // namespace qms
