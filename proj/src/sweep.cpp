#include "qms/sweep.hpp"

#include "qms/constants.hpp"
#include "qms/error.hpp"
#include "qms/log.hpp"
#include "qms/magnetics.hpp"
#include "qms/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace qms {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverFailure: return "solver_failure";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Resonance: return "resonance";
    default: return "numerical_failure";
  }
}

SweepRow failed_row(const char* status) {
  SweepRow r;
  r.lambda = r.fp_residual = r.det_a = r.det_b = r.det_c = r.lyapunov_residual = kNaN;
  r.status = status;
  return r;
}

void fill_from_point(SweepRow& row, const PointEvaluation& point) {
  row.stable = point.stable;
  row.fp_residual = point.fixed_point.residual;
  row.timings = point.timings;
  if (point.stable) {
    row.lambda = point.sph.lambda;
    row.entangled = point.sph.entangled;
    row.det_a = point.sph.det_a;
    row.det_b = point.sph.det_b;
    row.det_c = point.sph.det_c;
    row.lyapunov_residual = point.lyapunov_residual;
    row.status = "ok";
  } else {
    row.lambda = row.det_a = row.det_b = row.det_c = row.lyapunov_residual = kNaN;
    row.status = "unstable";
  }
}

SweepRow evaluate_at_capacitance(PhysicalParams params, double c_s, double c_i, double ratio,
                                 DetuningNormalization norm) {
  SweepRow row;
  try {
    apply_detuning(params, ratio, norm, c_s, c_i);
    fill_from_point(row, evaluate_point(params, c_s, c_i));
  } catch (const Error& e) {
    log_info(e.what());
    row = failed_row(status_for(e.code()));
  }
  row.detuning_ratio = ratio;
  return row;
}

// Worst phase sample of an RF-disturbed configuration at one detuning.
SweepRow evaluate_rf(const RunConfig& cfg, double f_ext, double ratio) {
  if (f_ext == 0.0) {
    return evaluate_row(cfg.params, cfg.field, ratio, cfg.normalization);
  }
  SweepRow worst;
  worst.lambda = -std::numeric_limits<double>::infinity();
  worst.entangled = true;
  worst.stable = true;
  for (double phase : kRfPhases) {
    const auto [h1, h2] = rf_modified_coefficients(cfg.field.v_h1, cfg.theta_ext, phase);
    VaractorModel side = cfg.varactor;
    double c_s = 0.0, c_i = 0.0;
    try {
      side.c_nominal = hall_to_varactor(h1, cfg.params);
      c_s = varactor_rf_capacitance(side, f_ext);
      side.c_nominal = hall_to_varactor(h2, cfg.params);
      c_i = varactor_rf_capacitance(side, f_ext);
    } catch (const Error& e) {
      SweepRow r = failed_row(status_for(e.code()));
      r.detuning_ratio = ratio;
      return r;
    }
    if (c_s <= 0.0 || c_i <= 0.0) {
      SweepRow r = failed_row("inductive");
      r.detuning_ratio = ratio;
      return r;
    }
    SweepRow r = evaluate_at_capacitance(cfg.params, c_s, c_i, ratio, cfg.normalization);
    if (r.status != "ok") return r;
    if (r.lambda > worst.lambda) {
      const StageTimings total{worst.timings.fixed_point + r.timings.fixed_point,
                               worst.timings.assembly + r.timings.assembly,
                               worst.timings.lyapunov + r.timings.lyapunov,
                               worst.timings.total + r.timings.total};
      const bool all_entangled = worst.entangled && r.entangled;
      worst = r;
      worst.timings = total;
      worst.entangled = all_entangled;
    } else {
      worst.entangled = worst.entangled && r.entangled;
    }
  }
  worst.detuning_ratio = ratio;
  return worst;
}

// Picks the row with the smallest lambda among successful ones; keeps the
// first failure status when none succeeded.
SweepRow pick_minimum(const std::vector<SweepRow>& rows) {
  const SweepRow* best = nullptr;
  bool any_entangled = false;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    any_entangled = any_entangled || r.entangled;
    if (!best || r.lambda < best->lambda) best = &r;
  }
  if (!best) return rows.empty() ? failed_row("numerical_failure") : rows.front();
  SweepRow out = *best;
  out.entangled = any_entangled;
  return out;
}

}  // namespace

SweepRow evaluate_row(const PhysicalParams& params, const FieldCoefficients& field, double ratio,
                      DetuningNormalization norm) {
  double c_s = 0.0, c_i = 0.0;
  try {
    c_s = hall_to_varactor(field.v_h1, params);
    c_i = hall_to_varactor(field.v_h2, params);
  } catch (const Error& e) {
    SweepRow r = failed_row(status_for(e.code()));
    r.detuning_ratio = ratio;
    return r;
  }
  return evaluate_at_capacitance(params, c_s, c_i, ratio, norm);
}

SweepRow min_over_detuning(const PhysicalParams& params, const FieldCoefficients& field,
                           const std::vector<double>& ratios, DetuningNormalization norm, int threads) {
  std::vector<SweepRow> rows(ratios.size());
  parallel_for(ratios.size(), threads,
               [&](std::size_t k) { rows[k] = evaluate_row(params, field, ratios[k], norm); });
  return pick_minimum(rows);
}

SweepRow evaluate_sweep_point(const RunConfig& cfg, double value) {
  RunConfig local = cfg;
  std::vector<double> ratios;
  switch (cfg.sweep.variable) {
    case SweepVariable::DetuningRatio:
      ratios = {value};
      break;
    case SweepVariable::Temperature:
      local.params.temperature = value;
      break;
    case SweepVariable::Chi2:
      local.params.chi2 = value;
      break;
    case SweepVariable::VH1:
      local.field.v_h1 = value;
      local.field.v_h2 = 1.0 - value;
      break;
    case SweepVariable::FieldAngle:
      local.field = project_field(value * constants::kTwoPi / 360.0, cfg.field_magnitude, 0.0, cfg.b_ref);
      break;
    case SweepVariable::FExt:
      break;
  }
  if (ratios.empty()) {
    ratios = cfg.detuning_scan.points > 0 ? cfg.detuning_scan.grid() : std::vector<double>{cfg.detuning_ratio};
  }

  std::vector<SweepRow> rows;
  rows.reserve(ratios.size());
  for (double r : ratios) {
    rows.push_back(cfg.sweep.variable == SweepVariable::FExt
                       ? evaluate_rf(local, value, r)
                       : evaluate_row(local.params, local.field, r, local.normalization));
  }
  SweepRow out = pick_minimum(rows);
  out.value = value;
  return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, int threads) {
  config.validate();
  const std::vector<double> grid = config.sweep.grid();
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), threads < 0 ? config.threads : threads,
               [&](std::size_t k) { rows[k] = evaluate_sweep_point(config, grid[k]); });
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& out, const RunConfig& config, const std::vector<SweepRow>& rows) {
  out << to_string(config.sweep.variable)
      << ",detuning_used,lambda_sph,entangled,stable,fp_residual,det_a,det_b,det_c,lyapunov_residual,status";
  if (config.emit_timing) out << ",t_fixed_point,t_assembly,t_lyapunov,t_total";
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.value) << ',' << format_double(r.detuning_ratio) << ',' << format_double(r.lambda)
        << ',' << (r.entangled ? 1 : 0) << ',' << (r.stable ? 1 : 0) << ',' << format_double(r.fp_residual)
        << ',' << format_double(r.det_a) << ',' << format_double(r.det_b) << ',' << format_double(r.det_c)
        << ',' << format_double(r.lyapunov_residual) << ',' << r.status;
    if (config.emit_timing) {
      out << ',' << format_double(r.timings.fixed_point) << ',' << format_double(r.timings.assembly) << ','
          << format_double(r.timings.lyapunov) << ',' << format_double(r.timings.total);
    }
    out << '\n';
  }
}

namespace {
template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}
}  // namespace

void write_sweep_csv(const std::filesystem::path& path, const RunConfig& config, const std::vector<SweepRow>& rows) {
  write_file(path, [&](std::ostream& out) { write_sweep_csv(out, config, rows); });
}

void write_compass_csv(std::ostream& out, const DirectionEstimate& e) {
  out << "pair,angle_deg,v_h1,v_h2,lambda_sph,entangled,stable,status\n";
  for (const auto& p : e.pairs) {
    const bool ok = p.status == "ok";
    out << p.index << ',' << format_double(p.angle * 360.0 / constants::kTwoPi) << ','
        << format_double(p.field.v_h1) << ',' << format_double(p.field.v_h2) << ','
        << format_double(ok ? p.sph.lambda : kNaN) << ',' << (ok && p.sph.entangled ? 1 : 0) << ','
        << (p.stable ? 1 : 0) << ',' << p.status << '\n';
  }
}

void write_compass_csv(const std::filesystem::path& path, const DirectionEstimate& estimate) {
  write_file(path, [&](std::ostream& out) { write_compass_csv(out, estimate); });
}

DirectionEstimate run_compass(const RunConfig& config, int threads) {
  config.validate();
  const SensorArray array = SensorArray::uniform(config.compass.pair_count, config.compass.b_ref);
  PhysicalParams params = config.params;
  if (config.normalization == DetuningNormalization::Mechanical) {
    apply_detuning(params, config.detuning_ratio, config.normalization, 0.0, 0.0);
  }
  return estimate_direction(array, config.compass.field_angle * constants::kTwoPi / 360.0,
                            config.compass.magnitude, params, threads < 0 ? config.threads : threads,
                            config.normalization, config.detuning_ratio);
}

}  // namespace qms
