#pragma once

// Covariance-matrix algebra for Gaussian states in the symmetrised
// quadrature convention (hbar = 1, vacuum variance 1/2 per quadrature).

#include <Eigen/Dense>

#include <random>

namespace qms {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

/// Real symmetric covariance of an even number of quadratures, ordered
/// (x_1, p_1, x_2, p_2, ...). Construction rejects asymmetric input.
class CovarianceMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  explicit CovarianceMatrix(Eigen::MatrixXd entries);

  static CovarianceMatrix vacuum(int dim);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  int modes() const noexcept { return dim() / 2; }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(int row, int col) const { return entries_(row, col); }

 private:
  Eigen::MatrixXd entries_;
};

enum class ModePair {
  Microwave,  // quadratures 9-12 of the 12-dimensional ordering
  Optical,    // quadratures 5-8
};

/// 2x2 blocks of a two-mode covariance [A, C; C^T, B].
struct BlockDecomposition {
  Mat2 a;
  Mat2 b;
  Mat2 c;

  Mat4 assemble() const;
  /// Exchange the roles of the two modes (A <-> B, C <-> C^T).
  BlockDecomposition swapped() const;
};

struct SphResult {
  double lambda = 0.0;
  bool entangled = false;
  double det_a = 0.0;
  double det_b = 0.0;
  double det_c = 0.0;
  bool stable = true;
};

/// First quadrature index (0-based) of `pair` in the 12-dimensional ordering.
int first_index(ModePair pair) noexcept;

BlockDecomposition extract_blocks(const CovarianceMatrix& cov, ModePair pair);
/// Blocks of a 4x4 two-mode covariance.
BlockDecomposition split_blocks(const CovarianceMatrix& cov4);
/// The 4x4 two-mode covariance for `pair` cut out of a 12x12 covariance.
CovarianceMatrix two_mode_covariance(const CovarianceMatrix& cov, ModePair pair);

/// Simon-Peres-Horodecki functional. Negative values certify entanglement.
SphResult sph_lambda(const BlockDecomposition& blocks);

/// Variant whose trace term carries a single C factor, tr(A J C J B^T J).
/// It is not a separability criterion (it calls a two-mode squeezed vacuum
/// separable); kept only so the discrepancy can be demonstrated.
double sph_lambda_single_cross_trace(const BlockDecomposition& blocks);

/// Symplectic eigenvalues in ascending order (one per mode). Throws
/// Unphysical when the matrix is not positive definite.
Eigen::VectorXd symplectic_eigenvalues(const CovarianceMatrix& cov);

/// True iff every symplectic eigenvalue is at least 1/2 - 1e-9.
bool uncertainty_check(const CovarianceMatrix& cov);

/// Smallest symplectic eigenvalue of the partially transposed (p_2 -> -p_2)
/// two-mode covariance.
double partial_transpose_min_symplectic(const CovarianceMatrix& cov4);

/// PPT test: entangled iff the partially transposed state violates the
/// uncertainty bound. Rejects unphysical input.
bool ppt_oracle(const CovarianceMatrix& cov4);

/// Thermal product state conjugated by a random two-mode symplectic built
/// from phase rotations, single-mode and two-mode squeezers.
CovarianceMatrix random_physical_two_mode(std::mt19937_64& rng);

}  // namespace qms
