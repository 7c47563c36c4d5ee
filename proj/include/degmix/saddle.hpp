#pragma once

#include <iosfwd>
#include <memory>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "degmix/assembly.hpp"

namespace degmix {

/// [[A, B^T], [B, 0]] with an optional bordering row for a zero-mean
/// multiplier.
struct BlockSaddleSystem {
  SparseMatrix a;
  SparseMatrix b;
  std::optional<Eigen::VectorXd> mean_row;
  Eigen::VectorXd f;
  Eigen::VectorXd g;
};

struct SaddleSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
  double residual = 0.0;         // relative residual of the full block system
  double mean_multiplier = 0.0;  // multiplier of the mean row, zero for compatible data
};

/// Factorizes the block matrix once; `solve` may then be called for any
/// number of right-hand sides.
class SaddleSolver {
 public:
  SaddleSolver(const SparseMatrix& a, const SparseMatrix& b,
               const std::optional<Eigen::VectorXd>& mean_row = std::nullopt);

  SaddleSolution solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;

  int primal_size() const { return n_; }
  int multiplier_size() const { return m_; }
  const SparseMatrix& matrix() const { return k_; }

  static constexpr double kResidualTolerance = 1e-10;

 private:
  int n_ = 0;
  int m_ = 0;
  bool bordered_ = false;
  SparseMatrix k_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

SaddleSolution solve(const BlockSaddleSystem& system);

/// Limit for the dense probes below (primal plus multiplier DOFs).
inline constexpr int kDenseProbeLimit = 3000;

/// Discrete inf-sup constant: square root of the smallest eigenvalue of
/// B X^{-1} B^T q = beta^2 M q. With `mean_row`, q ranges over its
/// orthogonal complement.
double estimate_infsup(const SparseMatrix& x, const SparseMatrix& b, const SparseMatrix& m,
                       const std::optional<Eigen::VectorXd>& mean_row = std::nullopt,
                       int max_dofs = kDenseProbeLimit);

/// Orthonormal basis of ker(B) via column-pivoted QR of B^T.
Eigen::MatrixXd kernel_basis(const SparseMatrix& b, int max_dofs = kDenseProbeLimit);

struct GardingEstimate {
  double xi = 0.0;
  double alpha = 0.0;
  int kernel_dim = 0;
  bool empty_kernel = false;  // alpha is +inf then
};

/// Smallest eigenvalue of Z^T (A + xi R) Z versus Z^T X Z.
GardingEstimate estimate_garding(const SparseMatrix& a, const SparseMatrix& r,
                                 const SparseMatrix& x, const Eigen::MatrixXd& kernel, double xi);

SparseMatrix read_matrix_market(std::istream& in);

}  // namespace degmix
