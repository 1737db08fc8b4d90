#include "qms/compass.hpp"
#include "qms/error.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using Catch::Approx;
using namespace qms;

TEST_CASE("sensor array layout", "[compass]") {
  const SensorArray a = SensorArray::uniform();
  CHECK(a.pair_count() == 36);
  CHECK(a.spacing() == Approx(M_PI / 18));
  CHECK(a.pair_angles.front() == 0.0);
  for (std::size_t k = 1; k < a.pair_angles.size(); ++k) CHECK(a.pair_angles[k] > a.pair_angles[k - 1]);
  CHECK(a.pair_angles.back() < 2 * M_PI);
  CHECK(a.b_ref == 0.01);

  CHECK_THROWS_AS(SensorArray::uniform(0), Error);
  SensorArray bad = a;
  std::swap(bad.pair_angles[1], bad.pair_angles[2]);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("field projection", "[compass]") {
  const double b = 0.01;
  auto f = project_field(0.3, b, 0.3, b);
  CHECK(f.v_h1 == Approx(1.0));
  CHECK(f.v_h2 == Approx(0.0).margin(1e-15));
  f = project_field(0.0, b, M_PI / 2, b);
  CHECK(f.v_h1 == Approx(0.5));
  CHECK(f.v_h2 == Approx(0.5));
  f = project_field(0.0, b, M_PI, b);
  CHECK(f.v_h1 == Approx(0.0).margin(1e-15));
  CHECK(f.v_h2 == Approx(1.0));
  f = project_field(0.0, b, std::acos(0.98), b);
  CHECK(f.v_h1 == Approx(0.99));
  CHECK(f.v_h2 == Approx(0.01));
  // Sub-full-scale fields keep the sum equal to the relative magnitude.
  f = project_field(1.0, 0.4 * b, 2.0, b);
  CHECK(f.v_h1 + f.v_h2 == Approx(0.4));
  // Over-range fields clamp.
  f = project_field(0.0, 3 * b, 0.0, b);
  CHECK(f.v_h1 == 1.0);
  CHECK_THROWS_AS(project_field(0, -1, 0, b), Error);
}

TEST_CASE("circular mean", "[compass]") {
  CHECK(circular_mean({0.1, 0.3}) == Approx(0.2));
  CHECK(circular_mean({2 * M_PI - 0.1, 0.1}) == Approx(0.0).margin(1e-12));
  const double m = circular_mean({2 * M_PI - 0.3, 0.1});
  CHECK(m == Approx(2 * M_PI - 0.1));
}

TEST_CASE("direction estimate", "[compass]") {
  PhysicalParams p;
  p.e_c = 3.2e6;
  p.e_omega = 1.4e6;
  p.detuning_oos = p.detuning_ooi = p.omega_m;
  const SensorArray a = SensorArray::uniform(12);

  SECTION("zero field is never detected") {
    const DirectionEstimate e = estimate_direction(a, 0.0, 0.0, p, 1);
    CHECK_FALSE(e.detected);
    CHECK(e.entangled_pairs.empty());
    CHECK(e.pairs.size() == 12);
  }
  SECTION("pairs are evaluated independently and in order") {
    const DirectionEstimate e1 = estimate_direction(a, 0.4, a.b_ref, p, 1);
    const DirectionEstimate e4 = estimate_direction(a, 0.4, a.b_ref, p, 4);
    REQUIRE(e1.pairs.size() == e4.pairs.size());
    for (std::size_t k = 0; k < e1.pairs.size(); ++k) {
      CHECK(e1.pairs[k].index == static_cast<int>(k));
      CHECK(e1.pairs[k].sph.lambda == e4.pairs[k].sph.lambda);
      CHECK(e1.pairs[k].field.v_h1 == Approx(project_field(0.4, a.b_ref, a.pair_angles[k], a.b_ref).v_h1));
    }
  }
}
