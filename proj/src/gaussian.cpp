#include "qms/gaussian.hpp"

#include "qms/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace qms {
namespace {

const Mat2 kJ = (Mat2() << 0.0, 1.0, -1.0, 0.0).finished();

Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) omega.block<2, 2>(2 * k, 2 * k) = kJ;
  return omega;
}

Mat4 rotation(double phi1, double phi2) {
  Mat4 r = Mat4::Zero();
  r.block<2, 2>(0, 0) << std::cos(phi1), std::sin(phi1), -std::sin(phi1), std::cos(phi1);
  r.block<2, 2>(2, 2) << std::cos(phi2), std::sin(phi2), -std::sin(phi2), std::cos(phi2);
  return r;
}

Mat4 single_mode_squeezers(double s1, double s2) {
  Mat4 s = Mat4::Zero();
  s.diagonal() << std::exp(-s1), std::exp(s1), std::exp(-s2), std::exp(s2);
  return s;
}

Mat4 two_mode_squeezer(double r) {
  Mat4 s = Mat4::Zero();
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  s.diagonal().setConstant(ch);
  s(0, 2) = s(2, 0) = sh;
  s(1, 3) = s(3, 1) = -sh;
  return s;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "covariance must be a non-empty square matrix");
  }
  if (entries_.rows() % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "covariance dimension must be even, got " + std::to_string(entries_.rows()));
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "covariance has non-finite entries");
  }
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::SymmetryViolation,
                "covariance is not symmetric (max |V - V^T| = " + std::to_string(asym) + ")");
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(int dim) {
  return CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(dim, dim));
}

Mat4 BlockDecomposition::assemble() const {
  Mat4 m;
  m << a, c, c.transpose(), b;
  return m;
}

BlockDecomposition BlockDecomposition::swapped() const { return {b, a, c.transpose()}; }

int first_index(ModePair pair) noexcept { return pair == ModePair::Microwave ? 8 : 4; }

BlockDecomposition extract_blocks(const CovarianceMatrix& cov, ModePair pair) {
  if (cov.dim() != 12) {
    throw Error(ErrorCode::InvalidArgument,
                "extract_blocks expects a 12x12 covariance, got dim " + std::to_string(cov.dim()));
  }
  const int i = first_index(pair);
  const auto& v = cov.entries();
  return {v.block<2, 2>(i, i), v.block<2, 2>(i + 2, i + 2), v.block<2, 2>(i, i + 2)};
}

BlockDecomposition split_blocks(const CovarianceMatrix& cov4) {
  if (cov4.dim() != 4) {
    throw Error(ErrorCode::InvalidArgument, "expected a 4x4 two-mode covariance");
  }
  const auto& v = cov4.entries();
  return {v.block<2, 2>(0, 0), v.block<2, 2>(2, 2), v.block<2, 2>(0, 2)};
}

CovarianceMatrix two_mode_covariance(const CovarianceMatrix& cov, ModePair pair) {
  return CovarianceMatrix(extract_blocks(cov, pair).assemble());
}

SphResult sph_lambda(const BlockDecomposition& blocks) {
  const Mat2& a = blocks.a;
  const Mat2& b = blocks.b;
  const Mat2& c = blocks.c;
  SphResult r;
  r.det_a = a.determinant();
  r.det_b = b.determinant();
  r.det_c = c.determinant();
  const double gap = 0.25 - std::abs(r.det_c);
  const double trace = (a * kJ * c * kJ * b * kJ * c.transpose() * kJ).trace();
  r.lambda = r.det_a * r.det_b + gap * gap - trace - 0.25 * (r.det_a + r.det_b);
  r.entangled = r.lambda < 0.0;
  return r;
}

double sph_lambda_single_cross_trace(const BlockDecomposition& blocks) {
  const Mat2& a = blocks.a;
  const Mat2& b = blocks.b;
  const Mat2& c = blocks.c;
  const double det_a = a.determinant();
  const double det_b = b.determinant();
  const double gap = 0.25 - std::abs(c.determinant());
  const double trace = (a * kJ * c * kJ * b.transpose() * kJ).trace();
  return det_a * det_b + gap * gap - trace - 0.25 * (det_a + det_b);
}

Eigen::VectorXd symplectic_eigenvalues(const CovarianceMatrix& cov) {
  // nu_k are the positive eigenvalues of the Hermitian V^1/2 (i Omega) V^1/2.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.entries());
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::Unphysical, "covariance is not positive definite");
  }
  const Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXcd k =
      std::complex<double>(0.0, 1.0) * (root * symplectic_form(cov.modes()) * root).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(k, Eigen::EigenvaluesOnly);
  if (hs.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "symplectic eigenvalue decomposition failed");
  }
  // Ascending; the upper half holds the positive branch.
  const int n = cov.modes();
  return hs.eigenvalues().tail(n);
}

bool uncertainty_check(const CovarianceMatrix& cov) {
  try {
    return symplectic_eigenvalues(cov).minCoeff() >= 0.5 - 1e-9;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Unphysical) return false;
    throw;
  }
}

double partial_transpose_min_symplectic(const CovarianceMatrix& cov4) {
  if (cov4.dim() != 4) {
    throw Error(ErrorCode::InvalidArgument, "partial transpose expects a 4x4 covariance");
  }
  Mat4 flip = Mat4::Identity();
  flip(3, 3) = -1.0;
  const Mat4 transposed = flip * cov4.entries() * flip;
  return symplectic_eigenvalues(CovarianceMatrix(transposed)).minCoeff();
}

bool ppt_oracle(const CovarianceMatrix& cov4) {
  if (!uncertainty_check(cov4)) {
    throw Error(ErrorCode::Unphysical, "ppt_oracle: covariance violates the uncertainty relation");
  }
  return partial_transpose_min_symplectic(cov4) < 0.5;
}

CovarianceMatrix random_physical_two_mode(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> occupation(0.0, 1.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> squeeze(-0.8, 0.8);
  std::uniform_real_distribution<double> pair_squeeze(0.0, 1.2);

  const double n1 = occupation(rng);
  const double n2 = occupation(rng);
  Mat4 thermal = Mat4::Zero();
  thermal.diagonal() << n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5;

  const double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng), p4 = phase(rng);
  const double s1 = squeeze(rng), s2 = squeeze(rng);
  const double r = pair_squeeze(rng);
  const double p5 = phase(rng), p6 = phase(rng);

  const Mat4 s = rotation(p5, p6) * two_mode_squeezer(r) * rotation(p3, p4) *
                 single_mode_squeezers(s1, s2) * rotation(p1, p2);
  Mat4 v = s * thermal * s.transpose();
  v = 0.5 * (v + v.transpose());
  return CovarianceMatrix(v);
}

}  // namespace qms
