#pragma once

// Physical parameters of a sensor pair and the coupling constants derived
// from them. All angular frequencies and rates are in rad/s.

#include <complex>
#include <optional>
#include <utility>

namespace qms {

struct FixedPoint;

/// How the optomechanical coupling is formed from the interaction
/// coefficient sqrt(alpha^2 omega_m / (2 eps0 m omega_o)).
enum class G11Convention {
  SqrtCoefficient,  // sqrt(2) * sqrt(...): quadrature form of the Hamiltonian term (default)
  Unrooted,         // sqrt(2) * (...): the radicand used directly
};

struct PhysicalParams {
  double alpha_c = 0.012;             // optical/mechanical coupling factor
  double lambda_p = 405e-9;           // pump wavelength, m
  double gamma = 500.0;               // mechanical damping
  double mass = 9e-11;                // resonator mass, kg
  double inductance = 5e-12;          // LC inductance, H
  double omega_m = 2.0 * 3.14159265358979323846 * 1e6;
  double kappa_s = 0.05 * omega_m;    // optical damping
  double kappa_i = 0.05 * omega_m;
  double kappa_cs = 0.02 * omega_m;   // microwave damping
  double kappa_ci = 0.02 * omega_m;
  double c1_x0 = 60e-12;              // resonator capacitance at equilibrium, F
  double c_d = 0.5e-12;               // fixed capacitance, F
  double c_vs_min = 10e-12;           // varactor range, F
  double c_vs_max = 120e-12;
  double chi2 = 1.2e-12;              // second-order susceptibility
  double refractive_index = 1.5;
  double e_p0 = 100.0;                // pump amplitude scale
  double e_c = 0.0;                   // optical drive rate
  double e_omega = 0.0;               // microwave drive rate
  double v_d = 0.0;                   // microwave driving field, V
  double temperature = 0.35;          // K
  double d_cap = 1e-6;                // capacitor gap, m
  double detuning_ocs = 0.0;          // optical detunings
  double detuning_oci = 0.0;
  double detuning_oos = 0.0;          // microwave detunings
  double detuning_ooi = 0.0;
  G11Convention g11_convention = G11Convention::SqrtCoefficient;

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
};

/// Drift-matrix coefficients that depend on the fixed point.
struct DriftCoefficients {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  double m5 = 0.0, m6 = 0.0, m7 = 0.0, m8 = 0.0;
};

struct CouplingSet {
  double g11 = 0.0;         // optomechanical, signal side (rad/s)
  double g22 = 0.0;         // optomechanical, idler side
  double g13 = 0.0;         // electromechanical, dimensionless
  double g23 = 0.0;
  double g_int = 0.0;       // down-conversion coupling (rad/s)
  double omega_mc_s = 0.0;  // LC resonances
  double omega_mc_i = 0.0;
  double omega_os = 0.0;    // optical carrier frequencies
  double omega_oi = 0.0;
  double c_vs_s = 0.0;      // varactor capacitances the set was derived for, F
  double c_vs_i = 0.0;
  double e_omega_s = 0.0;   // effective microwave drive per side
  double e_omega_i = 0.0;
  std::optional<DriftCoefficients> drift;

  /// Throws InvalidArgument when the set was derived without a fixed point.
  const DriftCoefficients& drift_coefficients() const;
};

/// Bose-Einstein occupation; exactly 0 at T = 0.
double thermal_occupation(double omega, double temperature);

/// Degenerate signal/idler pair (each half the pump frequency).
std::pair<double, double> optical_frequencies(double lambda_p);

/// LC resonance 1/sqrt(L C).
double microwave_frequency(double inductance, double c_n0);

/// C_N0 = C_d + C_vs + C_1(x0).
double total_capacitance(const PhysicalParams& params, double c_vs);

/// Parallel-plate derivative dC_1/dx = -C_1(x0) / d_cap.
double capacitance_gradient(const PhysicalParams& params);

/// Effective microwave drive: e_omega plus the V_d term of the LC Hamiltonian,
/// V_d C_M sqrt(omega_mc / (2 hbar C_N0)).
double microwave_drive(const PhysicalParams& params, double c_vs);

/// Coupling constants for varactor capacitances c_vs_s / c_vs_i. The
/// M-coefficients are filled only when `fixed_point` is given.
CouplingSet derive_couplings(const PhysicalParams& params, double c_vs_s, double c_vs_i,
                             const FixedPoint* fixed_point = nullptr);

/// M1..M8 for a converged fixed point.
DriftCoefficients drift_coefficients(const PhysicalParams& params, const CouplingSet& couplings,
                                     const FixedPoint& fixed_point);

}  // namespace qms
