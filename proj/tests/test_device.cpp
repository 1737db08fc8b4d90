#include "qms/constants.hpp"
#include "qms/device.hpp"
#include "qms/dynamics.hpp"
#include "qms/error.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using Catch::Approx;
using namespace qms;

TEST_CASE("thermal occupation", "[device]") {
  CHECK(thermal_occupation(1e9, 0.0) == 0.0);
  CHECK(thermal_occupation(2 * M_PI * 1e6, 0.0) == 0.0);

  // hbar w / kT = ln 2 gives exactly one quantum.
  const double t = 1.0;
  const double w = std::log(2.0) * constants::kBoltzmann * t / constants::kHbar;
  CHECK(thermal_occupation(w, t) == Approx(1.0).epsilon(1e-12));

  CHECK(thermal_occupation(2 * M_PI * 1e6, 0.35) == Approx(7.29e3).epsilon(1e-3));
  // Very cold optical mode underflows cleanly.
  CHECK(thermal_occupation(2.3e15, 0.35) == 0.0);

  CHECK_THROWS_AS(thermal_occupation(0.0, 1.0), Error);
  CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), Error);
  CHECK_THROWS_AS(thermal_occupation(1.0, -1.0), Error);
}

TEST_CASE("carrier and LC frequencies", "[device]") {
  const auto [ws, wi] = optical_frequencies(405e-9);
  CHECK(ws == wi);
  CHECK(ws + wi == Approx(2 * M_PI * constants::kSpeedOfLight / 405e-9));
  CHECK(ws == Approx(2.325e15).epsilon(1e-3));
  CHECK_THROWS_AS(optical_frequencies(0.0), Error);

  const PhysicalParams p;
  CHECK(total_capacitance(p, 65e-12) == Approx(125.5e-12));
  CHECK(microwave_frequency(p.inductance, total_capacitance(p, 65e-12)) == Approx(3.99e10).epsilon(1e-3));
  const double w_lo = microwave_frequency(p.inductance, total_capacitance(p, p.c_vs_min));
  const double w_hi = microwave_frequency(p.inductance, total_capacitance(p, p.c_vs_max));
  CHECK(w_hi / w_lo == Approx(0.625).epsilon(1e-3));
}

TEST_CASE("derived couplings", "[device]") {
  PhysicalParams p;
  const CouplingSet c = derive_couplings(p, 100e-12, 20e-12);

  SECTION("optomechanical coupling") {
    const double radicand = p.alpha_c * p.alpha_c * p.omega_m / (2 * constants::kEpsilon0 * p.mass * c.omega_os);
    CHECK(c.g11 == Approx(std::sqrt(2.0) * std::sqrt(radicand)).epsilon(1e-14));
    CHECK(c.g11 == Approx(2.2096e4).epsilon(1e-3));
    CHECK(c.g22 == c.g11);
    CHECK(c.g11 >= 0);

    p.g11_convention = G11Convention::Unrooted;
    CHECK(derive_couplings(p, 100e-12, 20e-12).g11 == Approx(std::sqrt(2.0) * radicand).epsilon(1e-14));
  }
  SECTION("electromechanical coupling per side") {
    const double zpf = std::sqrt(constants::kHbar / (p.mass * p.omega_m));
    CHECK(c.g13 == Approx(-p.c1_x0 / p.d_cap / (p.c_d + 100e-12 + p.c1_x0) * zpf));
    CHECK(c.g23 == Approx(-p.c1_x0 / p.d_cap / (p.c_d + 20e-12 + p.c1_x0) * zpf));
  }
  SECTION("down-conversion coupling is linear in chi2 and the pump") {
    CHECK(c.g_int == Approx(-p.chi2 * p.e_p0 * c.omega_os / (2 * 1.5 * 1.5)));
    PhysicalParams q = p;
    q.e_p0 *= 2;
    CHECK(derive_couplings(q, 100e-12, 20e-12).g_int == Approx(2 * c.g_int));
    q.chi2 = 0;
    CHECK(derive_couplings(q, 100e-12, 20e-12).g_int == 0.0);
  }
  SECTION("drift coefficients need a fixed point") {
    CHECK_FALSE(c.drift.has_value());
    CHECK_THROWS_AS(c.drift_coefficients(), Error);
  }
  SECTION("M coefficients") {
    FixedPoint fp;
    fp.c_s = {3.0, -4.0};
    fp.c_i = {1.0, 2.0};
    fp.q_s = 0.25;
    fp.q_i = -0.5;
    p.detuning_oos = 1e6;
    p.detuning_ooi = -2e6;
    const CouplingSet m = derive_couplings(p, 100e-12, 20e-12, &fp);
    const DriftCoefficients& d = m.drift_coefficients();
    const double h = 0.5 * std::sqrt(2.0);
    CHECK(d.m1 == Approx(h * m.g13 * 1e6 * 3.0));
    CHECK(d.m2 == Approx(h * m.g13 * 1e6 * -4.0));
    CHECK(d.m3 == Approx(h * m.g23 * -2e6 * 1.0));
    CHECK(d.m4 == Approx(h * m.g23 * -2e6 * 2.0));
    CHECK(d.m5 == Approx(-0.5 * m.g13 * 1e6 * 0.25));
    CHECK(d.m7 == Approx(-0.5 * m.g23 * -2e6 * -0.5));
    CHECK(d.m6 == 0.0);
    CHECK(d.m8 == 0.0);
  }
}

TEST_CASE("microwave drive includes the voltage term", "[device]") {
  PhysicalParams p;
  p.e_omega = 5.0;
  CHECK(microwave_drive(p, 50e-12) == 5.0);
  p.v_d = 1e-6;
  const double cn0 = total_capacitance(p, 50e-12);
  const double w = microwave_frequency(p.inductance, cn0);
  CHECK(microwave_drive(p, 50e-12) ==
        Approx(5.0 + 1e-6 * (p.c_d + 50e-12) * std::sqrt(w / (2 * constants::kHbar * cn0))));
}

TEST_CASE("parameter validation", "[device]") {
  PhysicalParams p;
  CHECK_NOTHROW(p.validate());
  p.temperature = -1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = PhysicalParams{};
  p.c_vs_min = p.c_vs_max;
  CHECK_THROWS_AS(p.validate(), Error);
  p = PhysicalParams{};
  p.mass = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = PhysicalParams{};
  p.detuning_oos = INFINITY;
  CHECK_THROWS_AS(p.validate(), Error);
}
