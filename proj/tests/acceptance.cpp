// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Loads the committed calibration from data/calibration.json.

#include "qms/compass.hpp"
#include "qms/config.hpp"
#include "qms/dynamics.hpp"
#include "qms/error.hpp"
#include "qms/gaussian.hpp"
#include "qms/log.hpp"
#include "qms/magnetics.hpp"
#include "qms/parallel.hpp"
#include "qms/sweep.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#ifndef QMS_SOURCE_DIR
#define QMS_SOURCE_DIR "."
#endif

using namespace qms;

namespace {

// Pinned tolerances.
constexpr int kOracleStates = 2000;
constexpr double kOracleSeconds = 5.0;
constexpr double kVacuumTol = 1e-14;
constexpr double kLyapunovTol = 1e-10;
constexpr double kUncertaintyFloor = 0.5 - 1e-9;
constexpr double kFixedPointTol = 1e-10;
constexpr double kLinearSolveTol = 1e-10;
constexpr double kBlockEigenTol = 1e-12;
constexpr double kSwapTol = 1e-9;
constexpr double kFieldScanSeconds = 60.0;
constexpr double kMonotoneSlack = 1e-12;  // relative, roundoff only
constexpr double kCrossBlockTol = 1e-15;  // relative to the local block
constexpr double kCapacitanceTol = 0.01;
constexpr double kCompassSeconds = 600.0;
constexpr int kDetuningPoints = 201;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string fixed(double v, int digits = 2) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every evaluate_point result seen while the acceptance run is active.
struct Audit {
  std::mutex mutex;
  long evaluations = 0;
  long stable = 0;
  double worst_lyapunov = 0.0;
  double worst_fixed_point = 0.0;
  double min_symplectic = INFINITY;

  void record(const PointEvaluation& e) {
    double nu = INFINITY;
    if (e.stable) nu = symplectic_eigenvalues(*e.covariance).minCoeff();
    std::lock_guard lock(mutex);
    ++evaluations;
    worst_fixed_point = std::max(worst_fixed_point, e.fixed_point.residual);
    if (e.stable) {
      ++stable;
      worst_lyapunov = std::max(worst_lyapunov, e.lyapunov_residual);
      min_symplectic = std::min(min_symplectic, nu);
    }
  }
};

std::vector<double> detuning_grid() {
  DetuningScan scan{-2.0, 2.0, kDetuningPoints};
  return scan.grid();
}

// 1. Sign of the SPH functional against the partial-transpose eigenvalue test.
Outcome oracle_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  int agree = 0, entangled = 0;
  for (int k = 0; k < kOracleStates; ++k) {
    const CovarianceMatrix cov = random_physical_two_mode(rng);
    const bool ppt = ppt_oracle(cov);
    if (sph_lambda(split_blocks(cov)).entangled == ppt) ++agree;
    if (ppt) ++entangled;
  }
  const double dt = seconds_since(t0);
  return {agree == kOracleStates && dt < kOracleSeconds,
          std::to_string(agree) + "/" + std::to_string(kOracleStates) + " agree (" + std::to_string(entangled) +
              " entangled), " + fixed(dt, 3) + " s"};
}

// 2.
Outcome vacuum_boundary() {
  const double l = sph_lambda(split_blocks(CovarianceMatrix::vacuum(4))).lambda;
  return {std::abs(l) < kVacuumTol, "lambda=" + sci(l)};
}

// 4b. With every nonlinear coupling removed the stationary equations are
// linear and solved here in closed form, independently of the library guess.
Outcome linear_fixed_point(const PhysicalParams& base) {
  PhysicalParams p = base;
  p.detuning_ocs = 0.3 * p.omega_m;
  p.detuning_oci = -0.2 * p.omega_m;
  p.detuning_oos = 0.7 * p.omega_m;
  p.detuning_ooi = -1.1 * p.omega_m;
  CouplingSet c = derive_couplings(p, hall_to_varactor(0.99, p), hall_to_varactor(0.01, p));
  c.g_int = c.g13 = c.g23 = 0.0;
  const FixedPoint fp = solve_fixed_point(p, c);

  const double w = p.omega_m;
  auto optical = [&](double kappa, double delta, double g) {
    Eigen::Matrix2d m;
    m << -kappa, delta, -delta + 2 * g * g / w, -kappa;
    const Eigen::Vector2d x = m.fullPivLu().solve(Eigen::Vector2d(-p.e_c, 0.0));
    const std::complex<double> a(x[0], x[1]);
    const double mom = -2 * g * a.real() / w;
    const double pos = -p.gamma * mom / w;
    return std::tuple{a, mom, pos};
  };
  const auto [a_s, p_s, q_s] = optical(p.kappa_s, p.detuning_ocs, c.g11);
  const auto [a_i, p_i, q_i] = optical(p.kappa_i, p.detuning_oci, c.g22);
  const std::complex<double> c_s = c.e_omega_s / std::complex<double>(p.kappa_cs, p.detuning_oos);
  const std::complex<double> c_i = c.e_omega_i / std::complex<double>(p.kappa_ci, p.detuning_ooi);

  auto rel = [](auto got, auto want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); };
  const double err = std::max({rel(fp.a_s, a_s), rel(fp.a_i, a_i), rel(fp.c_s, c_s), rel(fp.c_i, c_i),
                               rel(fp.p_s, p_s), rel(fp.p_i, p_i), rel(fp.q_s, q_s), rel(fp.q_i, q_i)});
  return {err < kLinearSolveTol, "closed-form mismatch " + sci(err)};
}

PhysicalParams random_draw(const PhysicalParams& base, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  PhysicalParams p = base;
  p.e_c = base.e_c * u(rng);
  p.e_omega = base.e_omega * u(rng);
  p.e_p0 = 10 * u(rng);
  p.temperature = base.temperature * u(rng);
  p.detuning_ocs = 0.3 * p.omega_m * u(rng);
  p.detuning_oci = -0.2 * p.omega_m * u(rng);
  p.detuning_oos = p.omega_m * u(rng);
  p.detuning_ooi = -p.omega_m * u(rng);
  return p;
}

// 5a. Structural zero pattern; 5b. decoupled 2x2 blocks against closed forms.
Outcome drift_fidelity(const PhysicalParams& base) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& pattern = drift_sparsity_pattern();
  int mismatched = 0, draws = 0;
  for (; draws < 100; ++draws) {
    const PhysicalParams p = random_draw(base, rng);
    const double cs = hall_to_varactor(u(rng), p), ci = hall_to_varactor(u(rng), p);
    const FixedPoint fp = solve_fixed_point(p, derive_couplings(p, cs, ci));
    const DriftMatrix d = assemble_drift(p, derive_couplings(p, cs, ci, &fp), fp);
    for (int r = 0; r < kStateDim; ++r)
      for (int col = 0; col < kStateDim; ++col)
        if (pattern[r][col] != (d.entries(r, col) != 0.0)) ++mismatched;
  }

  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const PhysicalParams p = random_draw(base, rng);
    CouplingSet c = derive_couplings(p, p.c_vs_min, p.c_vs_max);
    c.g11 = c.g22 = c.g13 = c.g23 = c.g_int = 0.0;
    DriftCoefficients m;
    m.m5 = 1e5 * (u(rng) - 0.5);
    m.m7 = 1e5 * (u(rng) - 0.5);
    c.drift = m;
    const DriftMatrix d = assemble_drift(p, c, FixedPoint{});

    using cd = std::complex<double>;
    std::vector<cd> expected;
    const cd disc = std::sqrt(cd(p.gamma * p.gamma - 4 * p.omega_m * p.omega_m));
    for (int side = 0; side < 2; ++side) {
      expected.push_back((-p.gamma + disc) / 2.0);
      expected.push_back((-p.gamma - disc) / 2.0);
    }
    for (auto [kappa, delta] : {std::pair{p.kappa_s, p.detuning_ocs}, std::pair{p.kappa_i, p.detuning_oci},
                                std::pair{p.kappa_cs, p.detuning_oos + m.m5},
                                std::pair{p.kappa_ci, p.detuning_ooi + m.m7}}) {
      expected.push_back(cd(-kappa, delta));
      expected.push_back(cd(-kappa, -delta));
    }
    // Each 2x2 diagonal block on its own, then the full matrix spectrum.
    for (int b = 0; b < 6; ++b) {
      const Eigen::Matrix2d blk = d.entries.block<2, 2>(2 * b, 2 * b);
      const auto ev = Eigen::EigenSolver<Eigen::Matrix2d>(blk).eigenvalues();
      const cd l1 = expected[2 * b], l2 = expected[2 * b + 1];
      const double scale = std::max(std::abs(l1), std::abs(l2));
      const double e = std::min(std::abs(ev[0] - l1) + std::abs(ev[1] - l2),
                                std::abs(ev[0] - l2) + std::abs(ev[1] - l1)) / scale;
      worst = std::max(worst, e);
    }
    std::vector<cd> full;
    const Eigen::MatrixXd dense = d.entries;
    const auto ev = Eigen::EigenSolver<Eigen::MatrixXd>(dense).eigenvalues();
    for (int i = 0; i < ev.size(); ++i) full.push_back(ev[i]);
    for (const cd& want : expected) {
      auto it = std::min_element(full.begin(), full.end(),
                                 [&](cd x, cd y) { return std::abs(x - want) < std::abs(y - want); });
      worst = std::max(worst, std::abs(*it - want) / std::abs(want));
      full.erase(it);
    }
  }
  return {mismatched == 0 && worst < kBlockEigenTol,
          std::to_string(mismatched) + " pattern mismatches over " + std::to_string(draws) +
              " draws, worst block eigenvalue error " + sci(worst)};
}

// 6.
Outcome swap_symmetry(const PhysicalParams& base) {
  PhysicalParams p = base;
  p.kappa_i = p.kappa_s;
  p.kappa_ci = p.kappa_cs;
  p.detuning_oci = p.detuning_ocs;
  double worst = 0.0;
  bool lambda_equal = true, all_stable = true;
  for (double v : {0.5, 0.99}) {
    for (double ratio : {0.0, 1.0}) {
      const double c = hall_to_varactor(v, p);
      PhysicalParams q = p;
      apply_detuning(q, ratio, DetuningNormalization::Mechanical, c, c);
      const PointEvaluation e = evaluate_point(q, c, c);
      if (!e.stable) {
        all_stable = false;
        continue;
      }
      Eigen::PermutationMatrix<kStateDim> perm;
      perm.indices() << 2, 3, 0, 1, 6, 7, 4, 5, 10, 11, 8, 9;
      const Eigen::MatrixXd& m = e.covariance->entries();
      worst = std::max(worst, (perm * m * perm.transpose() - m).cwiseAbs().maxCoeff() / m.cwiseAbs().maxCoeff());
      const double l2 = sph_lambda(extract_blocks(*e.covariance, ModePair::Microwave).swapped()).lambda;
      if (l2 != e.sph.lambda) lambda_equal = false;
    }
  }
  return {all_stable && worst < kSwapTol && lambda_equal,
          "relative covariance change " + sci(worst) + (lambda_equal ? ", lambda identical" : ", lambda differs") +
              (all_stable ? "" : ", unstable point")};
}

struct ScanSummary {
  int entangled = 0;
  int failed = 0;
  double min_lambda = INFINITY;
};

ScanSummary scan(const PhysicalParams& p, const FieldCoefficients& field) {
  const auto ratios = detuning_grid();
  std::vector<SweepRow> rows(ratios.size());
  parallel_for(ratios.size(), 0, [&](std::size_t k) {
    rows[k] = evaluate_row(p, field, ratios[k], DetuningNormalization::Mechanical);
  });
  ScanSummary s;
  for (const SweepRow& r : rows) {
    if (r.status != "ok") {
      ++s.failed;
      continue;
    }
    if (r.entangled) ++s.entangled;
    s.min_lambda = std::min(s.min_lambda, r.lambda);
  }
  return s;
}

// 7.
Outcome field_pattern(const PhysicalParams& base) {
  const auto t0 = std::chrono::steady_clock::now();
  PhysicalParams p = base;
  p.temperature = 0.35;
  p.chi2 = 1.2e-12;
  struct Case {
    double h1, h2;
    bool want_entangled;
  };
  const Case cases[] = {{0.5, 0.5, false}, {1, 1, false},       {0, 0, false},
                        {0.99, 0.01, true}, {0.98, 0.02, true}, {0.9, 0.1, false}};
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const ScanSummary s = scan(p, FieldCoefficients(c.h1, c.h2));
    const bool got = s.entangled > 0;
    ok = ok && got == c.want_entangled;
    char buf[160];
    std::snprintf(buf, sizeof buf, "(%.2f,%.2f) %d/%d entangled%s min %.4g%s; ", c.h1, c.h2, s.entangled,
                  kDetuningPoints, s.failed ? (", " + std::to_string(s.failed) + " failed").c_str() : "",
                  s.min_lambda, got == c.want_entangled ? "" : " [expected entangled]");
    detail += buf;
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < kFieldScanSeconds;
  return {ok, detail + fixed(dt) + " s"};
}

// 8.
Outcome temperature_pattern(const PhysicalParams& base) {
  const FieldCoefficients field(0.99, 0.01);
  std::vector<double> lambdas;
  std::string detail;
  bool ok = true;
  for (double t : {0.35, 0.4, 1.55, 10.0}) {
    PhysicalParams p = base;
    p.temperature = t;
    const ScanSummary s = scan(p, field);
    if (s.failed == kDetuningPoints) ok = false;
    if (!lambdas.empty() && s.min_lambda < lambdas.back() - kMonotoneSlack * std::abs(lambdas.back())) ok = false;
    lambdas.push_back(s.min_lambda);
    detail += "T=" + fixed(t) + " K: " + sci(s.min_lambda) + "; ";
  }
  ok = ok && lambdas.back() >= 0.0;
  return {ok, detail + (ok ? "non-decreasing" : "not non-decreasing or negative at 10 K")};
}

// 9.
Outcome chi2_pattern(const PhysicalParams& base) {
  const FieldCoefficients field(0.99, 0.01);
  std::vector<double> lambdas;
  bool monotone = true;
  for (int k = 0; k < 10; ++k) {
    PhysicalParams p = base;
    p.chi2 = 1.2e-12 * k / 9.0;
    const ScanSummary s = scan(p, field);
    if (!lambdas.empty() && s.min_lambda > lambdas.back() + kMonotoneSlack * std::abs(lambdas.back()))
      monotone = false;
    lambdas.push_back(s.min_lambda);
  }

  // At chi2 = 0 the down-conversion coupling vanishes and so must the
  // microwave cross block, at every detuning.
  PhysicalParams p = base;
  p.chi2 = 0.0;
  const double cs = hall_to_varactor(0.99, p), ci = hall_to_varactor(0.01, p);
  double worst_cross = 0.0, g_int = 0.0;
  for (double r : detuning_grid()) {
    PhysicalParams q = p;
    apply_detuning(q, r, DetuningNormalization::Mechanical, cs, ci);
    const PointEvaluation e = evaluate_point(q, cs, ci);
    g_int = std::max(g_int, std::abs(e.couplings.g_int));
    if (!e.stable) continue;
    const auto b = extract_blocks(*e.covariance, ModePair::Microwave);
    worst_cross = std::max(worst_cross, b.c.cwiseAbs().maxCoeff() / std::max(b.a.cwiseAbs().maxCoeff(), b.b.cwiseAbs().maxCoeff()));
  }
  const bool ok = monotone && lambdas.front() >= 0.0 && g_int == 0.0 && worst_cross < kCrossBlockTol;
  return {ok, "lambda(chi2=0)=" + sci(lambdas.front()) + ", lambda(1.2e-12)=" + sci(lambdas.back()) +
                  (monotone ? ", non-increasing" : ", not non-increasing") + ", cross block at chi2=0 " +
                  sci(worst_cross)};
}

// 10.
Outcome rf_pattern(const PhysicalParams& base) {
  const VaractorModel model;  // C_VS = 120 pF, L_E placed for f_r near 1.6 GHz
  double worst_dev = 0.0, worst_f = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double f = 1e9 * k / 1000.0;
    const double dev = std::abs(varactor_rf_capacitance(model, f) / model.c_nominal - 1.0);
    if (dev > worst_dev) {
      worst_dev = dev;
      worst_f = f;
    }
  }
  PhysicalParams p = base;
  p.temperature = 0.35;
  const FieldCoefficients field(0.99, 0.01);
  const bool baseline = mc_entanglement(p, field).entangled;
  std::string verdicts;
  bool at_100mhz = true, at_2ghz = false;
  try {
    at_100mhz = rf_disturbance_verdict(p, field, 100e6, 73.0, model);
    at_2ghz = rf_disturbance_verdict(p, field, 2e9, 73.0, model);
    verdicts = std::string("destroyed(100 MHz)=") + (at_100mhz ? "true" : "false") +
               ", destroyed(2 GHz)=" + (at_2ghz ? "true" : "false");
  } catch (const Error& e) {
    verdicts = std::string("verdict error: ") + e.what();
  }
  const bool ok = worst_dev <= kCapacitanceTol && !at_100mhz && at_2ghz;
  return {ok, "f_r=" + sci(model.self_resonance()) + " Hz, max |C_eff/C-1| up to 1 GHz " + sci(worst_dev) +
                  " at " + sci(worst_f) + " Hz; " + verdicts + "; baseline " +
                  (baseline ? "entangled" : "separable")};
}

// 11.
Outcome compass(const PhysicalParams& base) {
  const auto t0 = std::chrono::steady_clock::now();
  const SensorArray array = SensorArray::uniform(36, 0.01);
  const int k = 9;
  const double theta = array.pair_angles[k];
  std::string detail;
  bool aligned_ok = false;
  try {
    const DirectionEstimate d = estimate_direction(array, theta, array.b_ref, base);
    double err = std::abs(std::remainder(d.angle - theta, 2 * M_PI));
    aligned_ok = d.detected && err <= array.spacing() + 1e-12;
    detail = "aligned at pair " + std::to_string(k) + ": " + (d.detected ? "detected" : "not detected") + ", " +
             std::to_string(d.entangled_pairs.size()) + " entangled pairs";
    if (d.detected) detail += ", angle error " + fixed(err * 180 / M_PI, 3) + " deg";
  } catch (const Error& e) {
    detail = std::string("aligned: ") + e.what();
  }
  bool zero_ok = false;
  try {
    zero_ok = !estimate_direction(array, 0.0, 0.0, base).detected;
    detail += std::string("; zero field ") + (zero_ok ? "not detected" : "detected");
  } catch (const Error& e) {
    detail += std::string("; zero field: ") + e.what();
  }
  const double dt = seconds_since(t0);
  return {aligned_ok && zero_ok && dt < kCompassSeconds, detail + "; " + fixed(dt) + " s"};
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("error: ") + e.what()};
  }
}

}  // namespace

int main() {
  set_log_level(LogLevel::Error);
  RunConfig cfg;
  try {
    cfg = parse_config(R"({"calibration": "data/calibration.json"})", QMS_SOURCE_DIR);
  } catch (const std::exception& e) {
    std::printf("FAIL  calibration file could not be loaded: %s\n", e.what());
    return 1;
  }
  const PhysicalParams params = cfg.params;

  Audit audit;
  set_evaluation_observer([&audit](const PointEvaluation& e) { audit.record(e); });

  std::vector<Outcome> out(12);
  out[1] = guarded(oracle_agreement);
  out[2] = guarded(vacuum_boundary);
  const Outcome linear = guarded([&] { return linear_fixed_point(params); });
  out[5] = guarded([&] { return drift_fidelity(params); });
  out[6] = guarded([&] { return swap_symmetry(params); });
  out[7] = guarded([&] { return field_pattern(params); });
  out[8] = guarded([&] { return temperature_pattern(params); });
  out[9] = guarded([&] { return chi2_pattern(params); });
  out[10] = guarded([&] { return rf_pattern(params); });
  out[11] = guarded([&] { return compass(params); });
  set_evaluation_observer({});

  out[3] = {audit.stable > 0 && audit.worst_lyapunov < kLyapunovTol && audit.min_symplectic >= kUncertaintyFloor,
            std::to_string(audit.stable) + " steady covariances, worst residual " + sci(audit.worst_lyapunov) +
                ", min symplectic eigenvalue " + sci(audit.min_symplectic)};
  out[4] = {audit.evaluations > 0 && audit.worst_fixed_point < kFixedPointTol && linear.passed,
            std::to_string(audit.evaluations) + " fixed points, worst residual " + sci(audit.worst_fixed_point) +
                "; " + linear.detail};

  const char* names[] = {"",
                         "sph_ppt_oracle_agreement",
                         "vacuum_boundary",
                         "lyapunov_correctness",
                         "fixed_point_correctness",
                         "drift_fidelity",
                         "swap_symmetry",
                         "detuning_field_pattern",
                         "temperature_pattern",
                         "chi2_pattern",
                         "rf_disturbance_pattern",
                         "compass_direction"};
  int failures = 0;
  for (int k = 1; k <= 11; ++k) {
    std::printf("%s  %2d %-26s %s\n", out[k].passed ? "PASS" : "FAIL", k, names[k], out[k].detail.c_str());
    if (!out[k].passed) ++failures;
  }
  std::printf("%d/11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
