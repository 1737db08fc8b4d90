#include "qms/compass.hpp"

#include "qms/constants.hpp"
#include "qms/dynamics.hpp"
#include "qms/error.hpp"
#include "qms/log.hpp"
#include "qms/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace qms {
namespace {

constexpr double kTwoPi = constants::kTwoPi;

double wrap(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

}  // namespace

SensorArray SensorArray::uniform(int pair_count, double b_ref) {
  if (pair_count < 1) throw Error(ErrorCode::InvalidArgument, "pair_count must be positive");
  SensorArray a;
  a.b_ref = b_ref;
  a.pair_angles.resize(static_cast<std::size_t>(pair_count));
  for (int k = 0; k < pair_count; ++k) a.pair_angles[static_cast<std::size_t>(k)] = kTwoPi * k / pair_count;
  a.validate();
  return a;
}

double SensorArray::spacing() const { return pair_angles.empty() ? 0.0 : kTwoPi / pair_count(); }

void SensorArray::validate() const {
  if (pair_angles.empty()) throw Error(ErrorCode::InvalidArgument, "sensor array has no pairs");
  if (!(b_ref > 0.0) || !std::isfinite(b_ref)) {
    throw Error(ErrorCode::InvalidArgument, "b_ref must be positive");
  }
  for (std::size_t k = 0; k < pair_angles.size(); ++k) {
    const double a = pair_angles[k];
    if (!(a >= 0.0 && a < kTwoPi)) {
      throw Error(ErrorCode::InvalidArgument, "pair angles must lie in [0, 2pi)");
    }
    if (k > 0 && !(a > pair_angles[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "pair angles must be strictly increasing");
    }
  }
}

FieldCoefficients project_field(double theta_b, double magnitude, double pair_angle, double b_ref) {
  if (!(magnitude >= 0.0)) throw Error(ErrorCode::InvalidArgument, "field magnitude must be non-negative");
  if (!(b_ref > 0.0)) throw Error(ErrorCode::InvalidArgument, "b_ref must be positive");
  const double scale = magnitude / b_ref;
  const double c = std::cos(pair_angle - theta_b);
  FieldCoefficients f;
  f.v_h1 = std::clamp(scale * (1.0 + c) / 2.0, 0.0, 1.0);
  f.v_h2 = std::clamp(scale * (1.0 - c) / 2.0, 0.0, 1.0);
  return f;
}

double circular_mean(const std::vector<double>& angles) {
  double s = 0.0, c = 0.0;
  for (double a : angles) {
    s += std::sin(a);
    c += std::cos(a);
  }
  return wrap(std::atan2(s, c));
}

DirectionEstimate estimate_direction(const SensorArray& array, double theta_b, double magnitude,
                                     const PhysicalParams& params, int threads, DetuningNormalization norm,
                                     double detuning_ratio) {
  array.validate();
  params.validate();
  if (!(magnitude >= 0.0)) throw Error(ErrorCode::InvalidArgument, "field magnitude must be non-negative");

  DirectionEstimate out;
  const int n = array.pair_count();
  out.pairs.resize(static_cast<std::size_t>(n));
  if (magnitude == 0.0) {
    for (int k = 0; k < n; ++k) {
      auto& r = out.pairs[static_cast<std::size_t>(k)];
      r.index = k;
      r.angle = array.pair_angles[static_cast<std::size_t>(k)];
      r.status = "no_field";
    }
    return out;
  }

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t k) {
    PairReading& r = out.pairs[k];
    r.index = static_cast<int>(k);
    r.angle = array.pair_angles[k];
    r.field = project_field(theta_b, magnitude, r.angle, array.b_ref);
    try {
      const double c_s = hall_to_varactor(r.field.v_h1, params);
      const double c_i = hall_to_varactor(r.field.v_h2, params);
      PhysicalParams local = params;
      if (norm == DetuningNormalization::Microwave) apply_detuning(local, detuning_ratio, norm, c_s, c_i);
      const PointEvaluation point = evaluate_point(local, c_s, c_i);
      r.stable = point.stable;
      r.sph = point.sph;
      if (!point.stable) r.status = "unstable";
    } catch (const Error& e) {
      r.status = e.code() == ErrorCode::SolverFailure ? "solver_failure" : "numerical_failure";
      log_warning("compass pair " + std::to_string(k) + ": " + e.what());
    }
  });

  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (const auto& r : out.pairs) {
    if (r.stable && r.sph.entangled) {
      hit[static_cast<std::size_t>(r.index)] = true;
      out.entangled_pairs.push_back(r.index);
    }
  }
  if (out.entangled_pairs.empty()) return out;

  // Contiguity on the ring: count rising edges of the circular hit mask.
  int runs = 0;
  int run_start = -1;
  for (int k = 0; k < n; ++k) {
    const bool prev = hit[static_cast<std::size_t>((k + n - 1) % n)];
    if (hit[static_cast<std::size_t>(k)] && !prev) {
      ++runs;
      run_start = k;
    }
  }
  const int count = static_cast<int>(out.entangled_pairs.size());
  if (count == n) {
    run_start = 0;
  } else if (runs != 1) {
    throw Error(ErrorCode::Inconsistency,
                "entangled pairs form " + std::to_string(runs) + " separate arcs", "compass");
  }

  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(count));
  for (int idx : out.entangled_pairs) angles.push_back(array.pair_angles[static_cast<std::size_t>(idx)]);
  out.detected = true;
  out.angle = circular_mean(angles);
  const double first = array.pair_angles[static_cast<std::size_t>(run_start)];
  const double last = array.pair_angles[static_cast<std::size_t>((run_start + count - 1) % n)];
  out.effective_width = count == n ? kTwoPi : wrap(last - first);
  return out;
}

}  // namespace qms
