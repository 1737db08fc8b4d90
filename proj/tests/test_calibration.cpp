#include "qms/calibration.hpp"
#include "qms/dynamics.hpp"
#include "qms/magnetics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace qms;

namespace {

CalibrationOptions small_options() {
  CalibrationOptions o;
  o.e_omega_factors = {1, 10};
  o.e_p0_grid = {0, 100};
  o.detuning_ratios = {-1, 0, 1};
  o.threads = 1;
  return o;
}

}  // namespace

TEST_CASE("calibration meets the amplitude floor", "[calibration]") {
  const CalibrationOptions o = small_options();
  std::ostringstream log;
  const CalibrationResult r = calibrate(PhysicalParams{}, o, &log);
  CHECK(r.stable_at_defaults);
  CHECK(r.grid.size() == 4);

  const double cs = hall_to_varactor(0.99, r.params), ci = hall_to_varactor(0.01, r.params);
  PhysicalParams p = r.params;
  p.e_omega = r.e_omega_min;
  const FixedPoint fp = solve_fixed_point(p, derive_couplings(p, cs, ci));
  CHECK(std::min(std::abs(fp.a_s), std::abs(fp.a_i)) > o.min_amplitude);
  CHECK(std::min(std::abs(fp.c_s), std::abs(fp.c_i)) > o.min_amplitude);

  // One grid step lower must miss the floor.
  p.e_c = r.e_c_min / std::pow(10.0, 1.0 / o.steps_per_decade);
  p.e_omega = 0.0;
  const FixedPoint below = solve_fixed_point(p, derive_couplings(p, cs, ci));
  CHECK(std::min(std::abs(below.a_s), std::abs(below.a_i)) <= o.min_amplitude);

  CHECK(log.str().find("selected") != std::string::npos);
  const std::string json = calibration_json(r);
  CHECK(json.find("\"entangling_point_found\"") != std::string::npos);
}

TEST_CASE("calibration ignores drives already in the input", "[calibration]") {
  const CalibrationOptions o = small_options();
  PhysicalParams driven;
  driven.e_c = 1e9;
  driven.e_omega = 1e9;
  const CalibrationResult a = calibrate(PhysicalParams{}, o, nullptr);
  const CalibrationResult b = calibrate(driven, o, nullptr);
  CHECK(a.e_c_min == b.e_c_min);
  CHECK(a.e_omega_min == b.e_omega_min);
  CHECK(calibration_json(a) == calibration_json(b));
}
