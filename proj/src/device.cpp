#include "qms/device.hpp"

#include "qms/constants.hpp"
#include "qms/dynamics.hpp"
#include "qms/error.hpp"

#include <cmath>
#include <string>

namespace qms {
namespace {

using namespace constants;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive and finite");
  }
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be finite");
  }
}

double optomechanical_coupling(const PhysicalParams& p, double omega_o) {
  const double radicand = p.alpha_c * p.alpha_c * p.omega_m / (2.0 * kEpsilon0 * p.mass * omega_o);
  switch (p.g11_convention) {
    case G11Convention::SqrtCoefficient: return std::sqrt(2.0) * std::sqrt(radicand);
    case G11Convention::Unrooted: return std::sqrt(2.0) * radicand;
  }
  return 0.0;
}

struct SideTerms {
  double re_c, im_c, re_q, im_q;
};

// M-coefficient quartet for one side: {0.5 sqrt2 g D Re C, 0.5 sqrt2 g D Im C,
// -0.5 g D Re q, -0.5 g D Im q}.
SideTerms side_terms(double g, double detuning, std::complex<double> c, std::complex<double> q) {
  const double k = g * detuning;
  return {0.5 * std::sqrt(2.0) * k * c.real(), 0.5 * std::sqrt(2.0) * k * c.imag(),
          -0.5 * k * q.real(), -0.5 * k * q.imag()};
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(alpha_c, "alpha_c");
  require_positive(lambda_p, "lambda_p");
  require_positive(gamma, "gamma");
  require_positive(mass, "mass");
  require_positive(inductance, "inductance");
  require_positive(omega_m, "omega_m");
  require_positive(kappa_s, "kappa_s");
  require_positive(kappa_i, "kappa_i");
  require_positive(kappa_cs, "kappa_cs");
  require_positive(kappa_ci, "kappa_ci");
  require_positive(c1_x0, "c1_x0");
  require_positive(c_d, "c_d");
  require_positive(c_vs_min, "c_vs_min");
  require_positive(c_vs_max, "c_vs_max");
  require_positive(refractive_index, "refractive_index");
  require_positive(d_cap, "d_cap");
  if (!(c_vs_min < c_vs_max)) {
    throw Error(ErrorCode::InvalidArgument, "c_vs_min must be below c_vs_max");
  }
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be >= 0");
  }
  if (!(chi2 >= 0.0) || !std::isfinite(chi2)) {
    throw Error(ErrorCode::InvalidArgument, "chi2 must be >= 0");
  }
  require_finite(e_p0, "e_p0");
  require_finite(e_c, "e_c");
  require_finite(e_omega, "e_omega");
  require_finite(v_d, "v_d");
  require_finite(detuning_ocs, "detuning_ocs");
  require_finite(detuning_oci, "detuning_oci");
  require_finite(detuning_oos, "detuning_oos");
  require_finite(detuning_ooi, "detuning_ooi");
}

const DriftCoefficients& CouplingSet::drift_coefficients() const {
  if (!drift) {
    throw Error(ErrorCode::InvalidArgument,
                "drift coefficients M1..M8 require couplings derived with a fixed point");
  }
  return *drift;
}

double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "thermal_occupation: omega must be positive");
  }
  if (temperature < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "thermal_occupation: temperature must be >= 0");
  }
  if (temperature == 0.0) return 0.0;
  // expm1 overflows to +inf for very cold modes, giving exactly 0.
  return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature));
}

std::pair<double, double> optical_frequencies(double lambda_p) {
  require_positive(lambda_p, "lambda_p");
  const double pump = kTwoPi * kSpeedOfLight / lambda_p;
  return {0.5 * pump, 0.5 * pump};
}

double microwave_frequency(double inductance, double c_n0) {
  require_positive(inductance, "inductance");
  require_positive(c_n0, "c_n0");
  return 1.0 / std::sqrt(inductance * c_n0);
}

double total_capacitance(const PhysicalParams& params, double c_vs) {
  return params.c_d + c_vs + params.c1_x0;
}

double capacitance_gradient(const PhysicalParams& params) { return -params.c1_x0 / params.d_cap; }

double microwave_drive(const PhysicalParams& params, double c_vs) {
  if (params.v_d == 0.0) return params.e_omega;
  const double c_n0 = total_capacitance(params, c_vs);
  const double c_m = params.c_d + c_vs;
  const double omega = microwave_frequency(params.inductance, c_n0);
  return params.e_omega + params.v_d * c_m * std::sqrt(omega / (2.0 * kHbar * c_n0));
}

CouplingSet derive_couplings(const PhysicalParams& params, double c_vs_s, double c_vs_i,
                             const FixedPoint* fixed_point) {
  require_positive(c_vs_s, "c_vs_s");
  require_positive(c_vs_i, "c_vs_i");

  CouplingSet c;
  std::tie(c.omega_os, c.omega_oi) = optical_frequencies(params.lambda_p);
  c.g11 = optomechanical_coupling(params, c.omega_os);
  c.g22 = optomechanical_coupling(params, c.omega_oi);

  const double c_n0_s = total_capacitance(params, c_vs_s);
  const double c_n0_i = total_capacitance(params, c_vs_i);
  const double zero_point = std::sqrt(kHbar / (params.mass * params.omega_m));
  c.g13 = capacitance_gradient(params) / c_n0_s * zero_point;
  c.g23 = capacitance_gradient(params) / c_n0_i * zero_point;

  c.g_int = -params.chi2 * params.e_p0 * std::sqrt(c.omega_os * c.omega_oi) /
            (2.0 * params.refractive_index * params.refractive_index);

  c.omega_mc_s = microwave_frequency(params.inductance, c_n0_s);
  c.omega_mc_i = microwave_frequency(params.inductance, c_n0_i);
  c.c_vs_s = c_vs_s;
  c.c_vs_i = c_vs_i;
  c.e_omega_s = microwave_drive(params, c_vs_s);
  c.e_omega_i = microwave_drive(params, c_vs_i);

  if (fixed_point != nullptr) c.drift = drift_coefficients(params, c, *fixed_point);
  return c;
}

DriftCoefficients drift_coefficients(const PhysicalParams& params, const CouplingSet& couplings,
                                     const FixedPoint& fp) {
  // q is real at the fixed point, so the Im{q} terms (M6, M8) vanish.
  const auto s = side_terms(couplings.g13, params.detuning_oos, fp.c_s, {fp.q_s, 0.0});
  const auto i = side_terms(couplings.g23, params.detuning_ooi, fp.c_i, {fp.q_i, 0.0});
  return {s.re_c, s.im_c, i.re_c, i.im_c, s.re_q, s.im_q, i.re_q, i.im_q};
}

}  // namespace qms
