#include "qms/dynamics.hpp"

#include "qms/error.hpp"
#include "qms/log.hpp"
#include "qms/magnetics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

namespace qms {
namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

using Vec12 = Eigen::Matrix<double, 12, 1>;

// Unknown layout for the Newton solve.
enum Unknown { kReAs, kImAs, kReAi, kImAi, kReCs, kImCs, kReCi, kImCi, kQs, kQi, kPs, kPi };

Vec12 pack(const FixedPoint& fp) {
  Vec12 u;
  u << fp.a_s.real(), fp.a_s.imag(), fp.a_i.real(), fp.a_i.imag(), fp.c_s.real(), fp.c_s.imag(),
      fp.c_i.real(), fp.c_i.imag(), fp.q_s, fp.q_i, fp.p_s, fp.p_i;
  return u;
}

FixedPoint unpack(const Vec12& u) {
  FixedPoint fp;
  fp.a_s = {u[kReAs], u[kImAs]};
  fp.a_i = {u[kReAi], u[kImAi]};
  fp.c_s = {u[kReCs], u[kImCs]};
  fp.c_i = {u[kReCi], u[kImCi]};
  fp.q_s = u[kQs];
  fp.q_i = u[kQi];
  fp.p_s = u[kPs];
  fp.p_i = u[kPi];
  return fp;
}

// Per-side constants of the stationary equations.
struct Side {
  double kappa, detuning, g_om, e_c;        // optics
  double kappa_c, detuning_c, g_em, e_w;    // microwave
};

Side signal_side(const PhysicalParams& p, const CouplingSet& c) {
  return {p.kappa_s, p.detuning_ocs, c.g11, p.e_c, p.kappa_cs, p.detuning_oos, c.g13, c.e_omega_s};
}

Side idler_side(const PhysicalParams& p, const CouplingSet& c) {
  return {p.kappa_i, p.detuning_oci, c.g22, p.e_c, p.kappa_ci, p.detuning_ooi, c.g23, c.e_omega_i};
}

struct Equations {
  std::array<cd, 4> complex_eq;      // optical s, optical i, microwave s, microwave i
  std::array<double, 4> real_eq;     // P_s, P_i balances, q_s, q_i balances
  std::array<double, 4> complex_scale;
  std::array<double, 4> real_scale;
};

Equations evaluate(const PhysicalParams& p, const CouplingSet& c, const FixedPoint& fp) {
  const Side s = signal_side(p, c);
  const Side i = idler_side(p, c);
  const double w = p.omega_m;
  Equations e;

  auto optical = [&](const Side& side, cd a, cd other, double mom, int k) {
    const cd t1 = -(kI * side.detuning + side.kappa) * a;
    const cd t2 = -kI * side.g_om * mom;
    const cd t3 = -kI * c.g_int * std::conj(other);
    e.complex_eq[k] = t1 + t2 + t3 + side.e_c;
    e.complex_scale[k] = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(side.e_c);
  };
  optical(s, fp.a_s, fp.a_i, fp.p_s, 0);
  optical(i, fp.a_i, fp.a_s, fp.p_i, 1);

  auto microwave = [&](const Side& side, cd amp, double q, int k) {
    const cd t1 = -(kI * side.detuning_c + side.kappa_c) * amp;
    const cd t2 = kI * 0.5 * side.detuning_c * side.g_em * q * amp;
    e.complex_eq[k] = t1 + t2 + side.e_w;
    e.complex_scale[k] = std::abs(t1) + std::abs(t2) + std::abs(side.e_w);
  };
  microwave(s, fp.c_s, fp.q_s, 2);
  microwave(i, fp.c_i, fp.q_i, 3);

  auto position = [&](const Side& side, cd a, double mom, int k) {
    const double t1 = w * mom;
    const double t2 = side.g_om * 2.0 * a.real();
    e.real_eq[k] = t1 + t2;
    e.real_scale[k] = std::abs(t1) + std::abs(t2);
  };
  position(s, fp.a_s, fp.p_s, 0);
  position(i, fp.a_i, fp.p_i, 1);

  auto momentum = [&](const Side& side, cd amp, double q, double mom, int k) {
    const double t1 = -p.gamma * mom;
    const double t2 = -w * q;
    const double t3 = 0.5 * side.detuning_c * side.g_em * std::norm(amp);
    e.real_eq[k] = t1 + t2 + t3;
    e.real_scale[k] = std::abs(t1) + std::abs(t2) + std::abs(t3);
  };
  momentum(s, fp.c_s, fp.q_s, fp.p_s, 2);
  momentum(i, fp.c_i, fp.q_i, fp.p_i, 3);
  return e;
}

double relative(double value, double scale) {
  if (value == 0.0) return 0.0;
  if (scale == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(value) / scale;
}

// Residual vector in the Newton unknown layout, each entry divided by its
// equation's term magnitude so that the merit function is scale free.
Vec12 scaled_residual(const Equations& e) {
  Vec12 r;
  for (int k = 0; k < 4; ++k) {
    const double scale = e.complex_scale[k] > 0.0 ? e.complex_scale[k] : 1.0;
    r[2 * k] = e.complex_eq[k].real() / scale;
    r[2 * k + 1] = e.complex_eq[k].imag() / scale;
  }
  for (int k = 0; k < 4; ++k) {
    const double scale = e.real_scale[k] > 0.0 ? e.real_scale[k] : 1.0;
    r[8 + k] = e.real_eq[k] / scale;
  }
  return r;
}

Eigen::Matrix<double, 12, 12> jacobian(const PhysicalParams& p, const CouplingSet& c,
                                       const FixedPoint& fp, const Equations& e) {
  Eigen::Matrix<double, 12, 12> j = Eigen::Matrix<double, 12, 12>::Zero();
  const Side s = signal_side(p, c);
  const Side i = idler_side(p, c);
  const double g = c.g_int;
  const double w = p.omega_m;

  // Rows in residual layout: 0/1 Re/Im optical s, 2/3 optical i,
  // 4/5 microwave s, 6/7 microwave i, 8/9 position s/i, 10/11 momentum s/i.
  auto optical = [&](int row, const Side& side, int re_a, int im_a, int re_o, int im_o, int mom) {
    j(row, re_a) = -side.kappa;
    j(row, im_a) = side.detuning;
    j(row, im_o) = -g;
    j(row + 1, re_a) = -side.detuning;
    j(row + 1, im_a) = -side.kappa;
    j(row + 1, mom) = -side.g_om;
    j(row + 1, re_o) = -g;
  };
  optical(0, s, kReAs, kImAs, kReAi, kImAi, kPs);
  optical(2, i, kReAi, kImAi, kReAs, kImAs, kPi);

  auto microwave = [&](int row, const Side& side, cd amp, double q, int re_c, int im_c, int q_idx) {
    const double h = 0.5 * side.detuning_c * side.g_em;
    j(row, re_c) = -side.kappa_c;
    j(row, im_c) = side.detuning_c - h * q;
    j(row, q_idx) = -h * amp.imag();
    j(row + 1, re_c) = -side.detuning_c + h * q;
    j(row + 1, im_c) = -side.kappa_c;
    j(row + 1, q_idx) = h * amp.real();
  };
  microwave(4, s, fp.c_s, fp.q_s, kReCs, kImCs, kQs);
  microwave(6, i, fp.c_i, fp.q_i, kReCi, kImCi, kQi);

  j(8, kPs) = w;
  j(8, kReAs) = 2.0 * s.g_om;
  j(9, kPi) = w;
  j(9, kReAi) = 2.0 * i.g_om;

  auto momentum = [&](int row, const Side& side, cd amp, int re_c, int im_c, int q_idx, int mom) {
    const double h = 0.5 * side.detuning_c * side.g_em;
    j(row, mom) = -p.gamma;
    j(row, q_idx) = -w;
    j(row, re_c) = 2.0 * h * amp.real();
    j(row, im_c) = 2.0 * h * amp.imag();
  };
  momentum(10, s, fp.c_s, kReCs, kImCs, kQs, kPs);
  momentum(11, i, fp.c_i, kReCi, kImCi, kQi, kPi);

  // Same row scaling as scaled_residual (scales frozen at this iterate).
  for (int k = 0; k < 4; ++k) {
    const double scale = e.complex_scale[k] > 0.0 ? e.complex_scale[k] : 1.0;
    j.row(2 * k) /= scale;
    j.row(2 * k + 1) /= scale;
  }
  for (int k = 0; k < 4; ++k) {
    const double scale = e.real_scale[k] > 0.0 ? e.real_scale[k] : 1.0;
    j.row(8 + k) /= scale;
  }
  return j;
}

double max_relative(const Equations& e) {
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    worst = std::max(worst, relative(std::abs(e.complex_eq[k]), e.complex_scale[k]));
    worst = std::max(worst, relative(e.real_eq[k], e.real_scale[k]));
  }
  return worst;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::array<double, 8> fixed_point_residuals(const PhysicalParams& params, const CouplingSet& couplings,
                                            const FixedPoint& fp) {
  const Equations e = evaluate(params, couplings, fp);
  return {relative(std::abs(e.complex_eq[0]), e.complex_scale[0]),
          relative(std::abs(e.complex_eq[1]), e.complex_scale[1]),
          relative(std::abs(e.complex_eq[2]), e.complex_scale[2]),
          relative(std::abs(e.complex_eq[3]), e.complex_scale[3]),
          relative(e.real_eq[0], e.real_scale[0]),
          relative(e.real_eq[1], e.real_scale[1]),
          relative(e.real_eq[2], e.real_scale[2]),
          relative(e.real_eq[3], e.real_scale[3])};
}

double max_fixed_point_residual(const PhysicalParams& params, const CouplingSet& couplings,
                                const FixedPoint& fp) {
  return max_relative(evaluate(params, couplings, fp));
}

FixedPoint decoupled_guess(const PhysicalParams& params, const CouplingSet& couplings) {
  // Optics and momenta form a real-linear system once P = -2 G Re(A) / omega_m
  // is substituted; unknowns (Re A_s, Im A_s, Re A_i, Im A_i).
  const Side s = signal_side(params, couplings);
  const Side i = idler_side(params, couplings);
  const double g = couplings.g_int;
  const double w = params.omega_m;

  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  Eigen::Vector4d rhs;
  auto fill = [&](int row, const Side& side, int other) {
    m(row, row) = -side.kappa;
    m(row, row + 1) = side.detuning;
    m(row, other + 1) = -g;
    m(row + 1, row) = -side.detuning + 2.0 * side.g_om * side.g_om / w;
    m(row + 1, row + 1) = -side.kappa;
    m(row + 1, other) = -g;
    rhs[row] = -side.e_c;
    rhs[row + 1] = 0.0;
  };
  fill(0, s, 2);
  fill(2, i, 0);
  const Eigen::Vector4d x = m.fullPivLu().solve(rhs);

  FixedPoint fp;
  fp.a_s = {x[0], x[1]};
  fp.a_i = {x[2], x[3]};
  fp.p_s = -2.0 * s.g_om * x[0] / w;
  fp.p_i = -2.0 * i.g_om * x[2] / w;
  fp.c_s = s.e_w / (kI * s.detuning_c + s.kappa_c);
  fp.c_i = i.e_w / (kI * i.detuning_c + i.kappa_c);
  fp.q_s = (-params.gamma * fp.p_s + 0.5 * s.detuning_c * s.g_em * std::norm(fp.c_s)) / w;
  fp.q_i = (-params.gamma * fp.p_i + 0.5 * i.detuning_c * i.g_em * std::norm(fp.c_i)) / w;
  return fp;
}

FixedPoint solve_fixed_point(const PhysicalParams& params, const CouplingSet& couplings,
                             const NewtonOptions& options) {
  FixedPoint fp = decoupled_guess(params, couplings);
  Equations e = evaluate(params, couplings, fp);
  double residual = max_relative(e);
  // Stop well below the acceptance tolerance when the iteration allows it.
  const double target = std::min(options.tolerance, 1e-12);

  int iteration = 0;
  for (; iteration < options.max_iterations && residual > target; ++iteration) {
    const Vec12 r = scaled_residual(e);
    const auto jac = jacobian(params, couplings, fp, e);
    const auto lu = jac.fullPivLu();
    if (!lu.isInvertible()) break;
    const Vec12 step = lu.solve(-r);

    const Vec12 u = pack(fp);
    const double merit = r.squaredNorm();
    double scale = 1.0;
    FixedPoint trial;
    Equations trial_eq;
    bool improved = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      trial = unpack(u + scale * step);
      trial_eq = evaluate(params, couplings, trial);
      // Merit measured with the current iterate's scales.
      Vec12 tr;
      for (int k = 0; k < 4; ++k) {
        const double sc = e.complex_scale[k] > 0.0 ? e.complex_scale[k] : 1.0;
        tr[2 * k] = trial_eq.complex_eq[k].real() / sc;
        tr[2 * k + 1] = trial_eq.complex_eq[k].imag() / sc;
        const double sr = e.real_scale[k] > 0.0 ? e.real_scale[k] : 1.0;
        tr[8 + k] = trial_eq.real_eq[k] / sr;
      }
      if (tr.allFinite() && tr.squaredNorm() < merit) {
        improved = true;
        break;
      }
      scale *= options.damping;
    }
    if (!improved) break;
    fp = trial;
    e = trial_eq;
    residual = max_relative(e);
  }

  fp.iterations = iteration;
  fp.residual = residual;
  if (!(residual < options.tolerance)) {
    throw SolverFailure("fixed point did not converge after " + std::to_string(iteration) +
                            " iterations (residual " + sci(residual) + ")",
                        residual, iteration);
  }
  return fp;
}

const std::array<std::array<bool, kStateDim>, kStateDim>& drift_sparsity_pattern() {
  static const auto pattern = [] {
    std::array<std::array<bool, kStateDim>, kStateDim> p{};
    const std::array<std::pair<int, int>, 38> nonzero{{
        {0, 1}, {0, 4},
        {1, 0}, {1, 1}, {1, 8}, {1, 9},
        {2, 3}, {2, 6},
        {3, 2}, {3, 3}, {3, 10}, {3, 11},
        {4, 4}, {4, 5}, {4, 7},
        {5, 1}, {5, 4}, {5, 5}, {5, 6},
        {6, 5}, {6, 6}, {6, 7},
        {7, 3}, {7, 4}, {7, 6}, {7, 7},
        {8, 0}, {8, 8}, {8, 9},
        {9, 0}, {9, 8}, {9, 9},
        {10, 2}, {10, 10}, {10, 11},
        {11, 2}, {11, 10}, {11, 11},
    }};
    for (auto [r, c] : nonzero) p[r][c] = true;
    return p;
  }();
  return pattern;
}

DriftMatrix assemble_drift(const PhysicalParams& p, const CouplingSet& c, const FixedPoint& fp) {
  const DriftCoefficients m = c.drift ? *c.drift : drift_coefficients(p, c, fp);
  const double w = p.omega_m;
  const double g = c.g_int;
  DriftMatrix d;
  auto& a = d.entries;

  a(0, 1) = w;
  a(0, 4) = c.g11;
  a(1, 0) = -w;
  a(1, 1) = -p.gamma;
  a(1, 8) = m.m1;
  a(1, 9) = m.m2;

  a(2, 3) = w;
  a(2, 6) = c.g22;
  a(3, 2) = -w;
  a(3, 3) = -p.gamma;
  a(3, 10) = m.m3;
  a(3, 11) = m.m4;

  a(4, 4) = -p.kappa_s;
  a(4, 5) = p.detuning_ocs;
  a(4, 7) = -g;
  a(5, 1) = -c.g11;
  a(5, 4) = -p.detuning_ocs;
  a(5, 5) = -p.kappa_s;
  a(5, 6) = -g;

  a(6, 5) = -g;
  a(6, 6) = -p.kappa_i;
  a(6, 7) = p.detuning_oci;
  a(7, 3) = -c.g22;
  a(7, 4) = -g;
  a(7, 6) = -p.detuning_oci;
  a(7, 7) = -p.kappa_i;

  a(8, 0) = -m.m2;
  a(8, 8) = m.m6 - p.kappa_cs;
  a(8, 9) = m.m5 + p.detuning_oos;
  a(9, 0) = m.m1;
  a(9, 8) = -m.m5 - p.detuning_oos;
  a(9, 9) = m.m6 - p.kappa_cs;

  a(10, 2) = -m.m4;
  a(10, 10) = m.m8 - p.kappa_ci;
  a(10, 11) = m.m7 + p.detuning_ooi;
  a(11, 2) = m.m3;
  a(11, 10) = -m.m7 - p.detuning_ooi;
  a(11, 11) = m.m8 - p.kappa_ci;
  return d;
}

DiffusionMatrix assemble_diffusion(const PhysicalParams& p, const CouplingSet& c) {
  const double t = p.temperature;
  const double mech = p.gamma * (2.0 * thermal_occupation(p.omega_m, t) + 1.0);
  const double opt_s = p.kappa_s * (2.0 * thermal_occupation(c.omega_os, t) + 1.0);
  const double opt_i = p.kappa_i * (2.0 * thermal_occupation(c.omega_oi, t) + 1.0);
  const double mw_s = p.kappa_cs * (2.0 * thermal_occupation(c.omega_mc_s, t) + 1.0);
  const double mw_i = p.kappa_ci * (2.0 * thermal_occupation(c.omega_mc_i, t) + 1.0);
  DiffusionMatrix d;
  d.entries.diagonal() << 0.0, mech, 0.0, mech, opt_s, opt_s, opt_i, opt_i, mw_s, mw_s, mw_i, mw_i;
  return d;
}

double spectral_abscissa(const DriftMatrix& drift) {
  Eigen::EigenSolver<Mat12> es(drift.entries, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "drift eigenvalue computation failed", "stability");
  }
  return es.eigenvalues().real().maxCoeff();
}

bool stability_check(const DriftMatrix& drift) { return spectral_abscissa(drift) < -1e-12; }

double lyapunov_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& v, const Eigen::MatrixXd& d) {
  const double r = (a * v + v * a.transpose() + d).norm();
  const double dn = d.norm();
  return dn > 0.0 ? r / dn : r;
}

namespace {

// Complex Schur (Bartels-Stewart) solve of T Y + Y T^H = F for upper
// triangular T, back-transformed with U.
class SchurLyapunov {
 public:
  explicit SchurLyapunov(const Eigen::MatrixXd& a) : schur_(a) {
    if (schur_.info() != Eigen::Success) {
      throw Error(ErrorCode::NumericalFailure, "Schur decomposition failed", "lyapunov");
    }
    const auto& t = schur_.matrixT();
    const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.rows(); ++j) {
        if (std::abs(t(i, i) + std::conj(t(j, j))) < 1e3 * std::numeric_limits<double>::epsilon() * scale) {
          throw Error(ErrorCode::NumericalFailure, "lyapunov system is singular", "lyapunov");
        }
      }
    }
  }

  // Returns X with A X + X A^T = rhs.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    const auto& u = schur_.matrixU();
    const auto& t = schur_.matrixT();
    const Eigen::Index n = t.rows();
    const Eigen::MatrixXcd f = u.adjoint() * rhs.cast<cd>() * u;
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd shifted = t;
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      Eigen::VectorXcd col = f.col(j);
      for (Eigen::Index k = j + 1; k < n; ++k) col -= std::conj(t(j, k)) * y.col(k);
      shifted.diagonal() = t.diagonal().array() + std::conj(t(j, j));
      y.col(j) = shifted.triangularView<Eigen::Upper>().solve(col);
    }
    const Eigen::MatrixXd x = (u * y * u.adjoint()).real();
    return 0.5 * (x + x.transpose());
  }

 private:
  Eigen::ComplexSchur<Eigen::MatrixXd> schur_;
};

}  // namespace

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || d.rows() != n || d.cols() != n) {
    throw Error(ErrorCode::InvalidArgument, "lyapunov: dimension mismatch");
  }
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    if (es.info() != Eigen::Success || !(es.eigenvalues().real().maxCoeff() < -1e-12)) {
      throw Error(ErrorCode::Unstable, "drift matrix is not Hurwitz; no steady state", "stability");
    }
  }
  const SchurLyapunov solver(a);
  Eigen::MatrixXd v = solver.solve(-d);
  double res = lyapunov_residual(a, v, d);
  for (int refine = 0; refine < 3 && res > 1e-13; ++refine) {
    const Eigen::MatrixXd r = a * v + v * a.transpose() + d;
    const Eigen::MatrixXd candidate = v + solver.solve(-r);
    const double next = lyapunov_residual(a, candidate, d);
    if (!(next < res)) break;
    v = candidate;
    res = next;
  }
  if (!(res < 1e-10)) {
    throw Error(ErrorCode::NumericalFailure,
                "lyapunov residual " + sci(res) + " exceeds 1e-10", "lyapunov");
  }
  return v;
}

CovarianceMatrix steady_covariance(const DriftMatrix& drift, const DiffusionMatrix& diffusion) {
  return CovarianceMatrix(solve_lyapunov(drift.entries, diffusion.entries));
}

void apply_detuning(PhysicalParams& params, double ratio, DetuningNormalization norm, double c_vs_s,
                    double c_vs_i) {
  if (norm == DetuningNormalization::Mechanical) {
    params.detuning_oos = ratio * params.omega_m;
    params.detuning_ooi = ratio * params.omega_m;
  } else {
    params.detuning_oos = ratio * microwave_frequency(params.inductance, total_capacitance(params, c_vs_s));
    params.detuning_ooi = ratio * microwave_frequency(params.inductance, total_capacitance(params, c_vs_i));
  }
}

namespace {
std::mutex observer_mutex;
std::shared_ptr<const EvaluationObserver> observer;

std::shared_ptr<const EvaluationObserver> current_observer() {
  std::lock_guard lock(observer_mutex);
  return observer;
}
}  // namespace

void set_evaluation_observer(EvaluationObserver fn) {
  std::lock_guard lock(observer_mutex);
  observer = fn ? std::make_shared<const EvaluationObserver>(std::move(fn)) : nullptr;
}

PointEvaluation evaluate_point(const PhysicalParams& params, double c_vs_s, double c_vs_i) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  PointEvaluation out;

  const CouplingSet base = derive_couplings(params, c_vs_s, c_vs_i);
  try {
    out.fixed_point = solve_fixed_point(params, base);
  } catch (const SolverFailure& e) {
    throw Error(ErrorCode::SolverFailure, e.what(), "fixed_point");
  }
  out.timings.fixed_point = seconds_since(start);

  const auto assembly_start = std::chrono::steady_clock::now();
  out.couplings = derive_couplings(params, c_vs_s, c_vs_i, &out.fixed_point);
  out.drift = assemble_drift(params, out.couplings, out.fixed_point);
  out.diffusion = assemble_diffusion(params, out.couplings);
  out.stable = stability_check(out.drift);
  out.timings.assembly = seconds_since(assembly_start);

  if (out.stable) {
    const auto lyap_start = std::chrono::steady_clock::now();
    out.covariance = steady_covariance(out.drift, out.diffusion);
    out.lyapunov_residual =
        lyapunov_residual(out.drift.entries, out.covariance->entries(), out.diffusion.entries);
    out.sph = sph_lambda(extract_blocks(*out.covariance, ModePair::Microwave));
    out.timings.lyapunov = seconds_since(lyap_start);
  }
  out.sph.stable = out.stable;
  out.timings.total = seconds_since(start);
  if (const auto obs = current_observer()) (*obs)(out);
  return out;
}

SphResult mc_entanglement(const PhysicalParams& params, const FieldCoefficients& field) {
  const double c_s = hall_to_varactor(field.v_h1, params);
  const double c_i = hall_to_varactor(field.v_h2, params);
  PointEvaluation point = evaluate_point(params, c_s, c_i);
  if (!point.stable) {
    throw Error(ErrorCode::Unstable,
                "drift matrix is not Hurwitz (spectral abscissa " +
                    sci(spectral_abscissa(point.drift)) + ")",
                "stability");
  }
  return point.sph;
}

}  // namespace qms
