#pragma once

// Linearised Langevin dynamics of one sensor pair: semiclassical fixed point,
// drift/diffusion matrices and the steady-state covariance.
//
// Quadrature ordering used by every 12x12 matrix here:
//   0  x_s    mechanical position, signal side
//   1  p_s    mechanical momentum
//   2  x_i    mechanical position, idler side
//   3  p_i
//   4  x_os   optical quadratures, signal cavity
//   5  y_os
//   6  x_oi   optical quadratures, idler cavity
//   7  y_oi
//   8  x_ws   microwave quadratures, signal LC circuit
//   9  y_ws
//   10 x_wi   microwave quadratures, idler LC circuit
//   11 y_wi

#include "qms/device.hpp"
#include "qms/gaussian.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <optional>

namespace qms {

struct FieldCoefficients;

inline constexpr int kStateDim = 12;
using Mat12 = Eigen::Matrix<double, kStateDim, kStateDim>;

struct FixedPoint {
  std::complex<double> a_s, a_i;  // optical amplitudes
  std::complex<double> c_s, c_i;  // microwave amplitudes
  double q_s = 0.0, q_i = 0.0;    // mechanical positions (dimensionless)
  double p_s = 0.0, p_i = 0.0;    // mechanical momenta
  int iterations = 0;
  double residual = 0.0;          // max relative residual of the eight equations
};

struct DriftMatrix {
  Mat12 entries = Mat12::Zero();
};

struct DiffusionMatrix {
  Mat12 entries = Mat12::Zero();
};

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
  double damping = 0.5;  // step shrink factor when the residual grows
};

/// Relative residual of each stationary equation (signal/idler optical,
/// microwave, position and momentum balances). Complex equations count once.
std::array<double, 8> fixed_point_residuals(const PhysicalParams& params, const CouplingSet& couplings,
                                            const FixedPoint& fp);
double max_fixed_point_residual(const PhysicalParams& params, const CouplingSet& couplings,
                                const FixedPoint& fp);

/// Solution with the electromechanical nonlinearity dropped (q-dependent
/// frequency shift ignored); Newton's starting point.
FixedPoint decoupled_guess(const PhysicalParams& params, const CouplingSet& couplings);

/// Damped Newton iteration on the eight stationary equations.
/// Throws SolverFailure when the tolerance is not reached.
FixedPoint solve_fixed_point(const PhysicalParams& params, const CouplingSet& couplings,
                             const NewtonOptions& options = {});

DriftMatrix assemble_drift(const PhysicalParams& params, const CouplingSet& couplings,
                           const FixedPoint& fixed_point);
DiffusionMatrix assemble_diffusion(const PhysicalParams& params, const CouplingSet& couplings);

/// Entries of the drift matrix that are structurally nonzero.
const std::array<std::array<bool, kStateDim>, kStateDim>& drift_sparsity_pattern();

double spectral_abscissa(const DriftMatrix& drift);
bool stability_check(const DriftMatrix& drift);

/// ||A V + V A^T + D||_F / ||D||_F (absolute when D = 0).
double lyapunov_residual(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& covariance,
                         const Eigen::MatrixXd& diffusion);

/// Solves A V + V A^T + D = 0 for any square size. Throws Unstable for a
/// non-Hurwitz drift and NumericalFailure when the solve is singular or the
/// residual exceeds 1e-10.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion);

CovarianceMatrix steady_covariance(const DriftMatrix& drift, const DiffusionMatrix& diffusion);

/// Reference frequency of the detuning ratio: omega_m, or each side's LC resonance.
enum class DetuningNormalization { Mechanical, Microwave };

/// Sets the microwave detunings to ratio * omega_norm for the given varactor values.
void apply_detuning(PhysicalParams& params, double ratio, DetuningNormalization norm, double c_vs_s,
                    double c_vs_i);

struct StageTimings {
  double fixed_point = 0.0;  // seconds
  double assembly = 0.0;
  double lyapunov = 0.0;
  double total = 0.0;
};

/// Everything computed for one parameter point.
struct PointEvaluation {
  CouplingSet couplings;
  FixedPoint fixed_point;
  DriftMatrix drift;
  DiffusionMatrix diffusion;
  bool stable = false;
  std::optional<CovarianceMatrix> covariance;  // present iff stable
  double lyapunov_residual = 0.0;
  SphResult sph;                               // microwave pair; valid iff stable
  StageTimings timings;
};

/// Full pipeline for explicit varactor capacitances. Solver failures are
/// thrown with stage "fixed_point"; an unstable drift is reported through
/// `stable == false` rather than thrown.
PointEvaluation evaluate_point(const PhysicalParams& params, double c_vs_s, double c_vs_i);

/// Debug hook called with every completed evaluate_point result, possibly
/// from worker threads. Pass an empty function to detach.
using EvaluationObserver = std::function<void(const PointEvaluation&)>;
void set_evaluation_observer(EvaluationObserver observer);

/// Hall coefficients -> varactors -> pipeline -> SPH verdict for the
/// microwave pair. Unstable points throw Unstable (stage "stability").
SphResult mc_entanglement(const PhysicalParams& params, const FieldCoefficients& field);

}  // namespace qms
