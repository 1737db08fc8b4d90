#include "qms/calibration.hpp"

#include "qms/error.hpp"
#include "qms/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace qms {
namespace {

std::vector<double> default_ratios() {
  std::vector<double> r(201);
  for (int k = 0; k < 201; ++k) r[static_cast<std::size_t>(k)] = (-2.0 * (200 - k) + 2.0 * k) / 200.0;
  return r;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

// Coherent amplitudes of the stationary state, or nullopt when the solver fails.
std::optional<FixedPoint> amplitudes(const PhysicalParams& p, double c_s, double c_i) {
  try {
    return solve_fixed_point(p, derive_couplings(p, c_s, c_i));
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Smallest drive on a log grid for which pred holds.
template <class Pred>
double smallest_drive(const CalibrationOptions& o, Pred pred, const char* what) {
  const double lo = std::log10(o.drive_lo);
  const int n = static_cast<int>(std::ceil((std::log10(o.drive_hi) - lo) * o.steps_per_decade));
  for (int k = 0; k <= n; ++k) {
    const double drive = std::pow(10.0, lo + static_cast<double>(k) / o.steps_per_decade);
    if (pred(drive)) return drive;
  }
  throw SolverFailure(std::string("no ") + what + " in the search bracket reaches the amplitude bound",
                      std::numeric_limits<double>::infinity(), n + 1);
}

CalibrationCandidate scan_candidate(const PhysicalParams& base, const CalibrationOptions& o,
                                    const std::vector<double>& ratios, double c_s, double c_i) {
  CalibrationCandidate cand;
  cand.e_omega = base.e_omega;
  cand.e_p0 = base.e_p0;
  cand.g_int = derive_couplings(base, c_s, c_i).g_int;
  cand.total_points = static_cast<int>(ratios.size());
  cand.min_lambda = std::numeric_limits<double>::infinity();
  cand.argmin_ratio = std::numeric_limits<double>::quiet_NaN();
  for (double r : ratios) {
    PhysicalParams p = base;
    apply_detuning(p, r, o.normalization, c_s, c_i);
    try {
      const PointEvaluation e = evaluate_point(p, c_s, c_i);
      if (!e.stable) continue;
      ++cand.stable_points;
      cand.max_abs_det_c = std::max(cand.max_abs_det_c, std::abs(e.sph.det_c));
      if (e.sph.lambda < cand.min_lambda) {
        cand.min_lambda = e.sph.lambda;
        cand.argmin_ratio = r;
      }
    } catch (const Error&) {
    }
  }
  return cand;
}

}  // namespace

CalibrationResult calibrate(const PhysicalParams& base, const CalibrationOptions& o, std::ostream* log) {
  base.validate();
  const std::vector<double> ratios = o.detuning_ratios.empty() ? default_ratios() : o.detuning_ratios;
  const double c_s = hall_to_varactor(o.field.v_h1, base);
  const double c_i = hall_to_varactor(o.field.v_h2, base);
  auto say = [&](const std::string& line) {
    if (log) *log << line << '\n';
  };

  CalibrationResult res;
  res.params = base;
  // Drives already present in the config are what is being searched for.
  res.params.e_c = res.params.e_omega = 0.0;
  say("# calibration search");
  say("field v_h1=" + fmt(o.field.v_h1) + " v_h2=" + fmt(o.field.v_h2) + " c_vs_s=" + fmt(c_s) +
      " c_vs_i=" + fmt(c_i) + " T=" + fmt(base.temperature) + " chi2=" + fmt(base.chi2));

  // Stage 1: minimal optical drive, then minimal microwave drive, at the
  // configured detunings.
  res.e_c_min = smallest_drive(
      o,
      [&](double drive) {
        PhysicalParams p = res.params;
        p.e_c = drive;
        const auto fp = amplitudes(p, c_s, c_i);
        return fp && std::min(std::abs(fp->a_s), std::abs(fp->a_i)) > o.min_amplitude;
      },
      "optical drive");
  res.params.e_c = res.e_c_min;
  res.e_omega_min = smallest_drive(
      o,
      [&](double drive) {
        PhysicalParams p = res.params;
        p.e_omega = drive;
        const auto fp = amplitudes(p, c_s, c_i);
        return fp && std::min(std::abs(fp->c_s), std::abs(fp->c_i)) > o.min_amplitude;
      },
      "microwave drive");
  res.params.e_omega = res.e_omega_min;
  say("stage1 e_c_min=" + fmt(res.e_c_min) + " e_omega_min=" + fmt(res.e_omega_min) +
      " (smallest on a " + std::to_string(o.steps_per_decade) + "-per-decade grid with |A|,|C| > " +
      fmt(o.min_amplitude) + ")");
  {
    const PointEvaluation e = evaluate_point(res.params, c_s, c_i);
    res.stable_at_defaults = e.stable;
    say(std::string("stage1 stability at defaults: ") + (e.stable ? "stable" : "UNSTABLE") +
        " spectral_abscissa=" + fmt(spectral_abscissa(e.drift)));
  }

  // Stage 2: drive/pump grid, min lambda over the detuning sweep.
  std::vector<std::pair<double, double>> cells;
  for (double f : o.e_omega_factors) {
    for (double e_p0 : o.e_p0_grid) cells.emplace_back(res.e_omega_min * f, e_p0);
  }
  res.grid.resize(cells.size());
  parallel_for(cells.size(), o.threads, [&](std::size_t k) {
    PhysicalParams p = res.params;
    p.e_omega = cells[k].first;
    p.e_p0 = cells[k].second;
    res.grid[k] = scan_candidate(p, o, ratios, c_s, c_i);
  });

  say("stage2 grid: " + std::to_string(cells.size()) + " cells x " + std::to_string(ratios.size()) +
      " detuning points");
  say("e_omega,e_p0,g_int,min_lambda,argmin_ratio,stable_points,total_points,max_abs_det_c");
  const CalibrationCandidate* best = nullptr;
  for (const auto& c : res.grid) {
    say(fmt(c.e_omega) + "," + fmt(c.e_p0) + "," + fmt(c.g_int) + "," + fmt(c.min_lambda) + "," +
        fmt(c.argmin_ratio) + "," + std::to_string(c.stable_points) + "," + std::to_string(c.total_points) +
        "," + fmt(c.max_abs_det_c));
    // Only cells stable across the whole sweep qualify.
    if (c.stable_points != c.total_points) continue;
    if (!best) {
      best = &c;
      continue;
    }
    const double tie = 1e-9 * std::max(1.0, std::abs(best->min_lambda));
    if (c.min_lambda < best->min_lambda - tie) {
      best = &c;
    } else if (std::abs(c.min_lambda - best->min_lambda) <= tie) {
      // Near-equal lambda: prefer the weaker microwave drive, then the
      // stronger cross-pair correlation.
      if (c.e_omega < best->e_omega || (c.e_omega == best->e_omega && c.max_abs_det_c > best->max_abs_det_c)) {
        best = &c;
      }
    }
  }
  if (!best) {
    throw Error(ErrorCode::Unstable, "no drive/pump cell is stable across the detuning sweep", "calibration");
  }
  res.best = *best;
  res.params.e_omega = best->e_omega;
  res.params.e_p0 = best->e_p0;
  res.entangling_point_found = best->min_lambda < 0.0;
  say("selection: lowest min_lambda; within 1e-9 relative, the smaller e_omega and then the larger |det C|");
  say("selected e_omega=" + fmt(best->e_omega) + " e_p0=" + fmt(best->e_p0) + " g_int=" + fmt(best->g_int) +
      " min_lambda=" + fmt(best->min_lambda) + " at ratio " + fmt(best->argmin_ratio));

  PhysicalParams cold = res.params;
  cold.temperature = 0.0;
  res.zero_temperature_min_lambda = scan_candidate(cold, o, ratios, c_s, c_i).min_lambda;
  say("selected cell at T=0: min_lambda=" + fmt(res.zero_temperature_min_lambda));
  say(std::string("entangling_point_found=") + (res.entangling_point_found ? "true" : "false"));
  if (!res.entangling_point_found) {
    say("no stable cell reaches lambda < 0 for the microwave pair; the largest cross-block |det C| seen was " +
        fmt([&] {
          double m = 0.0;
          for (const auto& c : res.grid) m = std::max(m, c.max_abs_det_c);
          return m;
        }()));
  }
  return res;
}

std::string calibration_json(const CalibrationResult& r) {
  nlohmann::ordered_json doc;
  doc["params"] = {{"e_c", r.params.e_c}, {"e_omega", r.params.e_omega}, {"e_p0", r.params.e_p0}};
  doc["e_c_min"] = r.e_c_min;
  doc["e_omega_min"] = r.e_omega_min;
  doc["stable_at_defaults"] = r.stable_at_defaults;
  doc["g_int"] = r.best.g_int;
  doc["min_lambda"] = r.best.min_lambda;
  doc["argmin_detuning_ratio"] = r.best.argmin_ratio;
  doc["zero_temperature_min_lambda"] = r.zero_temperature_min_lambda;
  doc["entangling_point_found"] = r.entangling_point_found;
  doc["search_log"] = "calibration_search.log";
  return doc.dump(2) + "\n";
}

}  // namespace qms
