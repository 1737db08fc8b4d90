#include "qms/error.hpp"
#include "qms/gaussian.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using Catch::Approx;
using namespace qms;

namespace {

CovarianceMatrix tmsv(double r) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
  const double ch = std::cosh(2 * r) / 2, sh = std::sinh(2 * r) / 2;
  v.diagonal().setConstant(ch);
  v(0, 2) = v(2, 0) = sh;
  v(1, 3) = v(3, 1) = -sh;
  return CovarianceMatrix(v);
}

// Determinant-free oracle: smallest PT symplectic eigenvalue for the standard
// form, nu_- = sqrt((Delta - sqrt(Delta^2 - 4 det V)) / 2),
// Delta = det A + det B - 2 det C.
double pt_nu_closed_form(const CovarianceMatrix& cov) {
  const BlockDecomposition b = split_blocks(cov);
  const double delta = b.a.determinant() + b.b.determinant() - 2 * b.c.determinant();
  const double det = cov.entries().determinant();
  return std::sqrt((delta - std::sqrt(delta * delta - 4 * det)) / 2);
}

}  // namespace

TEST_CASE("covariance construction validates shape and symmetry", "[gaussian]") {
  REQUIRE_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Zero(3, 3)), Error);
  REQUIRE_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Zero(2, 4)), Error);
  REQUIRE_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd(0, 0)), Error);

  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(4, 4) * 0.5;
  v(0, 1) = 0.1;
  try {
    CovarianceMatrix c(v);
    FAIL("asymmetric matrix accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SymmetryViolation);
  }

  v(0, 1) = v(1, 0) + 1e-14;
  CHECK_NOTHROW(CovarianceMatrix(v));

  v(2, 2) = std::nan("");
  CHECK_THROWS_AS(CovarianceMatrix(v), Error);
}

TEST_CASE("block extraction uses the documented quadrature slots", "[gaussian]") {
  SECTION("vacuum") {
    const auto b = extract_blocks(CovarianceMatrix::vacuum(12), ModePair::Microwave);
    CHECK(b.a.isApprox(0.5 * Mat2::Identity()));
    CHECK(b.b.isApprox(0.5 * Mat2::Identity()));
    CHECK(b.c.isZero());
  }
  SECTION("single cross entry, 1-based (9, 11) -> C(0, 0)") {
    Eigen::MatrixXd v = 0.5 * Eigen::MatrixXd::Identity(12, 12);
    v(8, 10) = v(10, 8) = 0.3;
    const auto b = extract_blocks(CovarianceMatrix(v), ModePair::Microwave);
    CHECK(b.c(0, 0) == 0.3);
    CHECK(b.c(0, 1) == 0.0);
  }
  SECTION("random symmetric matrix against index-by-index slicing") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    Eigen::MatrixXd m(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) m(i, j) = n(rng);
    m = (m + m.transpose()).eval();
    const CovarianceMatrix cov(m);
    for (auto [pair, base] : {std::pair{ModePair::Microwave, 8}, std::pair{ModePair::Optical, 4}}) {
      const auto b = extract_blocks(cov, pair);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          CHECK(b.a(i, j) == m(base + i, base + j));
          CHECK(b.b(i, j) == m(base + 2 + i, base + 2 + j));
          CHECK(b.c(i, j) == m(base + i, base + 2 + j));
        }
      }
      CHECK(two_mode_covariance(cov, pair).entries() == m.block(base, base, 4, 4));
    }
  }
  SECTION("wrong dimension") {
    CHECK_THROWS_AS(extract_blocks(CovarianceMatrix::vacuum(4), ModePair::Microwave), Error);
    CHECK_THROWS_AS(split_blocks(CovarianceMatrix::vacuum(12)), Error);
  }
}

TEST_CASE("sph functional on reference states", "[gaussian][sph]") {
  SECTION("vacuum sits on the boundary") {
    const SphResult r = sph_lambda(split_blocks(CovarianceMatrix::vacuum(4)));
    CHECK(std::abs(r.lambda) < 1e-14);
    CHECK_FALSE(r.entangled);
  }
  SECTION("thermal product states") {
    for (double n : {0.0, 0.3, 1.0, 7.5, 100.0}) {
      BlockDecomposition b;
      b.a = b.b = (n + 0.5) * Mat2::Identity();
      b.c.setZero();
      const double expected = std::pow((n + 0.5) * (n + 0.5) - 0.25, 2);
      CHECK(sph_lambda(b).lambda == Approx(expected).margin(1e-12));
      CHECK_FALSE(sph_lambda(b).entangled);
    }
  }
  SECTION("two-mode squeezed vacuum is entangled") {
    for (double r : {0.1, 0.5, 1.0}) {
      const SphResult s = sph_lambda(split_blocks(tmsv(r)));
      CHECK(s.lambda < 0);
      CHECK(s.entangled);
      CHECK(ppt_oracle(tmsv(r)));
    }
  }
  SECTION("single-C trace variant misses the two-mode squeezed vacuum") {
    CHECK(sph_lambda_single_cross_trace(split_blocks(tmsv(1.0))) > 0);
  }
  SECTION("product states with general blocks") {
    BlockDecomposition b;
    b.a << 1.2, 0.3, 0.3, 0.9;
    b.b << 0.7, -0.1, -0.1, 0.6;
    b.c.setZero();
    const double expected = (b.a.determinant() - 0.25) * (b.b.determinant() - 0.25);
    CHECK(sph_lambda(b).lambda == Approx(expected).epsilon(1e-12));
  }
  SECTION("invariant under mode swap") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
      const auto b = split_blocks(random_physical_two_mode(rng));
      CHECK(sph_lambda(b.swapped()).lambda == Approx(sph_lambda(b).lambda).epsilon(1e-10).margin(1e-12));
    }
  }
}

TEST_CASE("symplectic spectrum", "[gaussian]") {
  SECTION("thermal state") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
    v.diagonal() << 1.5, 1.5, 0.5, 0.5;
    const auto nu = symplectic_eigenvalues(CovarianceMatrix(v));
    CHECK(nu[0] == Approx(0.5));
    CHECK(nu[1] == Approx(1.5));
  }
  SECTION("squeezed single mode stays pure") {
    Eigen::MatrixXd v(2, 2);
    v << 0.5 * std::exp(2.0), 0, 0, 0.5 * std::exp(-2.0);
    CHECK(symplectic_eigenvalues(CovarianceMatrix(v))[0] == Approx(0.5));
  }
  SECTION("below vacuum fails the uncertainty check") {
    Eigen::MatrixXd v = 0.4 * Eigen::MatrixXd::Identity(2, 2);
    CHECK_FALSE(uncertainty_check(CovarianceMatrix(v)));
    CHECK_THROWS_AS(ppt_oracle(CovarianceMatrix(0.4 * Eigen::MatrixXd::Identity(4, 4))), Error);
  }
  SECTION("not positive definite") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(2, 2);
    v(1, 1) = -1;
    CHECK_THROWS_AS(symplectic_eigenvalues(CovarianceMatrix(v)), Error);
  }
  SECTION("partial transpose against the closed form") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
      const auto cov = random_physical_two_mode(rng);
      CHECK(partial_transpose_min_symplectic(cov) == Approx(pt_nu_closed_form(cov)).epsilon(1e-8));
    }
  }
}

TEST_CASE("sph and ppt agree on random physical states", "[gaussian][sph]") {
  std::mt19937_64 rng(20240601);
  int entangled = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto cov = random_physical_two_mode(rng);
    REQUIRE(uncertainty_check(cov));
    const bool sph = sph_lambda(split_blocks(cov)).entangled;
    REQUIRE(sph == ppt_oracle(cov));
    entangled += sph;
  }
  // The generator must exercise both verdicts.
  CHECK(entangled > 100);
  CHECK(entangled < 900);
}
