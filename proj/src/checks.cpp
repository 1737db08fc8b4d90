#include "qms/checks.hpp"

#include "qms/dynamics.hpp"
#include "qms/error.hpp"
#include "qms/gaussian.hpp"
#include "qms/magnetics.hpp"
#include "qms/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>

namespace qms {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

CheckResult sph_ppt_agreement(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int mismatches = 0;
  constexpr int kStates = 1000;
  for (int k = 0; k < kStates; ++k) {
    const CovarianceMatrix cov = random_physical_two_mode(rng);
    if (sph_lambda(split_blocks(cov)).entangled != ppt_oracle(cov)) ++mismatches;
  }
  return {"sph_ppt_agreement", mismatches == 0,
          std::to_string(kStates - mismatches) + "/" + std::to_string(kStates) + " verdicts agree"};
}

CheckResult vacuum_boundary() {
  const double l = sph_lambda(split_blocks(CovarianceMatrix::vacuum(4))).lambda;
  return {"vacuum_boundary", std::abs(l) < 1e-14, "lambda=" + fmt(l)};
}

CheckResult tmsv_entangled() {
  const double r = 1.0;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
  const double ch = std::cosh(2 * r) / 2, sh = std::sinh(2 * r) / 2;
  v(0, 0) = v(1, 1) = v(2, 2) = v(3, 3) = ch;
  v(0, 2) = v(2, 0) = sh;
  v(1, 3) = v(3, 1) = -sh;
  const CovarianceMatrix cov(v);
  const SphResult s = sph_lambda(split_blocks(cov));
  return {"tmsv_entangled", s.entangled && ppt_oracle(cov), "lambda=" + fmt(s.lambda)};
}

CheckResult scalar_lyapunov() {
  const double kappa = 3.0, n = 2.5;
  Eigen::MatrixXd a = -kappa * Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd d = kappa * (2 * n + 1) * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd v = solve_lyapunov(a, d);
  const double err = (v - (n + 0.5) * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff();
  return {"scalar_lyapunov", err < 1e-12, "max error " + fmt(err)};
}

CheckResult linear_fixed_point(const PhysicalParams& params) {
  PhysicalParams p = params;
  if (p.e_c == 0.0) p.e_c = 1e7;
  p.detuning_ocs = 0.3 * p.omega_m;
  CouplingSet c = derive_couplings(p, p.c_vs_min, p.c_vs_max);
  c.g_int = c.g13 = c.g23 = 0.0;
  const FixedPoint fp = solve_fixed_point(p, c);
  // Closed form: -(i D + k) A - i G P + E = 0, P = -2 G Re(A) / w.
  const double k = p.kappa_s, dlt = p.detuning_ocs, g = c.g11, w = p.omega_m;
  Eigen::Matrix2d m;
  m << -k, dlt, -dlt + 2 * g * g / w, -k;
  const Eigen::Vector2d x = m.inverse() * Eigen::Vector2d(-p.e_c, 0.0);
  const double err = std::abs(fp.a_s - std::complex<double>(x[0], x[1])) / std::abs(std::complex<double>(x[0], x[1]));
  return {"linear_fixed_point", err < 1e-10, "relative error " + fmt(err)};
}

CheckResult drift_pattern(const PhysicalParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  const auto& pattern = drift_sparsity_pattern();
  int bad = 0;
  for (int draw = 0; draw < 100; ++draw) {
    PhysicalParams p = params;
    p.e_c = 1e7 * u(rng);
    p.e_omega = 1e7 * u(rng);
    p.e_p0 = 10 * u(rng);
    p.detuning_ocs = 0.3 * p.omega_m * u(rng);
    p.detuning_oci = -0.2 * p.omega_m * u(rng);
    p.detuning_oos = p.omega_m * u(rng);
    p.detuning_ooi = -p.omega_m * u(rng);
    const double cs = hall_to_varactor(u(rng) / 2.0, p), ci = hall_to_varactor(u(rng) / 2.0, p);
    const CouplingSet c0 = derive_couplings(p, cs, ci);
    const FixedPoint fp = solve_fixed_point(p, c0);
    const DriftMatrix d = assemble_drift(p, derive_couplings(p, cs, ci, &fp), fp);
    for (int r = 0; r < kStateDim; ++r) {
      for (int col = 0; col < kStateDim; ++col) {
        if (pattern[r][col] != (d.entries(r, col) != 0.0)) ++bad;
      }
    }
  }
  return {"drift_pattern", bad == 0, std::to_string(bad) + " mismatched entries over 100 draws"};
}

CheckResult mechanical_block(const PhysicalParams& params) {
  PhysicalParams p = params;
  p.e_c = p.e_omega = p.v_d = 0.0;
  p.chi2 = 0.0;
  CouplingSet c = derive_couplings(p, p.c_vs_min, p.c_vs_min);
  c.g11 = c.g22 = c.g13 = c.g23 = c.g_int = 0.0;
  c.drift = DriftCoefficients{};
  const DriftMatrix d = assemble_drift(p, c, FixedPoint{});
  Eigen::EigenSolver<Eigen::Matrix2d> es(d.entries.block<2, 2>(0, 0));
  const std::complex<double> disc = std::sqrt(std::complex<double>(p.gamma * p.gamma - 4 * p.omega_m * p.omega_m));
  const std::complex<double> l1 = (-p.gamma + disc) / 2.0, l2 = (-p.gamma - disc) / 2.0;
  const auto ev = es.eigenvalues();
  const double scale = std::abs(l1);
  const double err = std::min(std::abs(ev[0] - l1) + std::abs(ev[1] - l2), std::abs(ev[0] - l2) + std::abs(ev[1] - l1)) / scale;
  return {"mechanical_block_eigenvalues", err < 1e-12, "relative error " + fmt(err)};
}

CheckResult swap_symmetry(const PhysicalParams& params) {
  PhysicalParams p = params;
  p.kappa_i = p.kappa_s;
  p.kappa_ci = p.kappa_cs;
  p.detuning_oci = p.detuning_ocs;
  p.detuning_ooi = p.detuning_oos = p.omega_m;
  const double c = hall_to_varactor(0.5, p);
  const PointEvaluation e = evaluate_point(p, c, c);
  if (!e.stable) return {"swap_symmetry", false, "unstable"};
  Eigen::PermutationMatrix<kStateDim> perm;
  perm.indices() << 2, 3, 0, 1, 6, 7, 4, 5, 10, 11, 8, 9;
  const Eigen::MatrixXd& v = e.covariance->entries();
  const Eigen::MatrixXd swapped = perm * v * perm.transpose();
  const double err = (swapped - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
  const double l2 = sph_lambda(extract_blocks(*e.covariance, ModePair::Microwave).swapped()).lambda;
  return {"swap_symmetry", err < 1e-9 && l2 == e.sph.lambda, "relative difference " + fmt(err)};
}

CheckResult pipeline_consistency(const PhysicalParams& params) {
  const double cs = hall_to_varactor(0.99, params), ci = hall_to_varactor(0.01, params);
  double worst_lyap = 0.0, worst_fp = 0.0;
  int unphysical = 0, evaluated = 0;
  for (double r : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    PhysicalParams p = params;
    apply_detuning(p, r, DetuningNormalization::Mechanical, cs, ci);
    const PointEvaluation e = evaluate_point(p, cs, ci);
    if (!e.stable) continue;
    ++evaluated;
    worst_lyap = std::max(worst_lyap, e.lyapunov_residual);
    worst_fp = std::max(worst_fp, e.fixed_point.residual);
    if (!uncertainty_check(*e.covariance)) ++unphysical;
  }
  const bool ok = evaluated > 0 && worst_lyap < 1e-10 && worst_fp < 1e-10 && unphysical == 0;
  return {"pipeline_consistency", ok,
          std::to_string(evaluated) + " stable points, lyapunov " + fmt(worst_lyap) + ", fixed point " +
              fmt(worst_fp) + ", " + std::to_string(unphysical) + " unphysical"};
}

CheckResult varactor_curve() {
  VaractorModel m;
  const double fr = m.self_resonance();
  const double a = varactor_rf_capacitance(m, fr / std::sqrt(2.0)) / m.c_nominal;
  const double b = varactor_rf_capacitance(m, 2 * fr) / m.c_nominal;
  const bool ok = std::abs(a - 2.0) < 1e-9 && std::abs(b + 1.0 / 3.0) < 1e-9;
  return {"varactor_curve", ok, "f_r=" + fmt(fr) + " Hz, C(f_r/sqrt2)/C=" + fmt(a) + ", C(2f_r)/C=" + fmt(b)};
}

}  // namespace

std::vector<CheckResult> run_checks(const PhysicalParams& params, std::uint64_t seed, int threads) {
  params.validate();
  const std::vector<std::pair<const char*, std::function<CheckResult()>>> checks{
      {"sph_ppt_agreement", [&] { return sph_ppt_agreement(seed); }},
      {"vacuum_boundary", [] { return vacuum_boundary(); }},
      {"tmsv_entangled", [] { return tmsv_entangled(); }},
      {"scalar_lyapunov", [] { return scalar_lyapunov(); }},
      {"linear_fixed_point", [&] { return linear_fixed_point(params); }},
      {"drift_pattern", [&] { return drift_pattern(params, seed); }},
      {"mechanical_block_eigenvalues", [&] { return mechanical_block(params); }},
      {"swap_symmetry", [&] { return swap_symmetry(params); }},
      {"pipeline_consistency", [&] { return pipeline_consistency(params); }},
      {"varactor_curve", [] { return varactor_curve(); }},
  };
  std::vector<CheckResult> out(checks.size());
  parallel_for(checks.size(), threads, [&](std::size_t k) {
    try {
      out[k] = checks[k].second();
    } catch (const Error& e) {
      out[k] = {checks[k].first, false, e.what()};
    }
  });
  return out;
}

}  // namespace qms
