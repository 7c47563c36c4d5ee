#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "degmix/error.hpp"
#include "degmix/saddle.hpp"

using namespace degmix;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& d) { return d.sparseView(); }

Eigen::MatrixXd random_matrix(std::mt19937& rng, int r, int c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST(Saddle, TwoByTwoHandSolution) {
  Eigen::MatrixXd a(2, 2), b(1, 2);
  a << 2, 0, 0, 1;
  b << 1, 1;
  const SaddleSolution s = solve({sparse(a), sparse(b), std::nullopt, Eigen::Vector2d(1, 1), Eigen::VectorXd::Ones(1)});
  EXPECT_NEAR(s.u(0), 1.0 / 3, 1e-14);
  EXPECT_NEAR(s.u(1), 2.0 / 3, 1e-14);
  EXPECT_NEAR(s.lambda(0), 1.0 / 3, 1e-14);
  EXPECT_LT(s.residual, 1e-14);
}

TEST(Saddle, RecoversConstructedSolution) {
  std::mt19937 rng(7);
  const Eigen::MatrixXd l = random_matrix(rng, 12, 12);
  const Eigen::MatrixXd a = l * l.transpose() + Eigen::MatrixXd::Identity(12, 12);
  const Eigen::MatrixXd b = random_matrix(rng, 4, 12);
  const Eigen::VectorXd u = random_matrix(rng, 12, 1), lam = random_matrix(rng, 4, 1);
  const SaddleSolver solver(sparse(a), sparse(b));
  const SaddleSolution s = solver.solve(a * u + b.transpose() * lam, b * u);
  EXPECT_LT((s.u - u).norm(), 1e-12 * u.norm());
  EXPECT_LT((s.lambda - lam).norm(), 1e-12 * lam.norm());
}

TEST(Saddle, RandomSystemMatchesDenseLu) {
  std::mt19937 rng(11);
  const int n = 15, m = 5;
  const Eigen::MatrixXd l = random_matrix(rng, n, n);
  const Eigen::MatrixXd a = l * l.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd b = random_matrix(rng, m, n);
  const Eigen::VectorXd f = random_matrix(rng, n, 1), g = random_matrix(rng, m, 1);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = a;
  k.topRightCorner(n, m) = b.transpose();
  k.bottomLeftCorner(m, n) = b;
  Eigen::VectorXd rhs(n + m);
  rhs << f, g;
  const Eigen::VectorXd x = k.fullPivLu().solve(rhs);
  const SaddleSolution s = solve({sparse(a), sparse(b), std::nullopt, f, g});
  EXPECT_LT((s.u - x.head(n)).norm(), 1e-11 * x.norm());
  EXPECT_LT((s.lambda - x.tail(m)).norm(), 1e-11 * x.norm());
}

TEST(Saddle, SolutionMapIsSymmetric) {
  std::mt19937 rng(3);
  const int n = 8, m = 3;
  const Eigen::MatrixXd l = random_matrix(rng, n, n);
  const Eigen::MatrixXd a = l * l.transpose() + Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd b = random_matrix(rng, m, n);
  const SaddleSolver solver(sparse(a), sparse(b));
  const Eigen::VectorXd f1 = random_matrix(rng, n, 1), f2 = random_matrix(rng, n, 1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
  const SaddleSolution s1 = solver.solve(f1, zero), s2 = solver.solve(f2, zero);
  EXPECT_NEAR(f2.dot(s1.u), f1.dot(s2.u), 1e-12);
}

TEST(Saddle, MeanRowFixesConstantMode) {
  // b has the constant vector in its left kernel; the mean row removes it.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3), b(2, 3);
  b << 1, -1, 0, -1, 1, 0;
  Eigen::VectorXd mean(2);
  mean << 0.5, 0.5;
  const Eigen::Vector3d f(1, 2, 3);
  const SaddleSolution s = solve({sparse(a), sparse(b), mean, f, Eigen::VectorXd::Zero(2)});
  EXPECT_NEAR(mean.dot(s.lambda), 0.0, 1e-14);
  EXPECT_NEAR(s.u(0), s.u(1), 1e-14);
  EXPECT_NEAR(s.u(2), 3.0, 1e-14);
  EXPECT_NEAR(s.mean_multiplier, 0.0, 1e-14);
  EXPECT_LT(s.residual, 1e-14);
}

TEST(Saddle, RankDeficientConstraintIsSingular) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3), b(2, 3);
  b << 1, 0, 0, 2, 0, 0;
  try {
    SaddleSolver solver(sparse(a), sparse(b));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(Saddle, DimensionMismatchThrows) {
  EXPECT_THROW(SaddleSolver(sparse(Eigen::MatrixXd::Identity(3, 3)), sparse(Eigen::MatrixXd::Ones(1, 2))), Error);
}

TEST(InfSup, IdentityExample) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 4);
  b(0, 0) = 1;
  b(1, 1) = 1;
  const SparseMatrix x = sparse(Eigen::MatrixXd::Identity(4, 4)), m = sparse(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_NEAR(estimate_infsup(x, sparse(b), m), 1.0, 1e-12);
}

TEST(InfSup, ScalingLaws) {
  std::mt19937 rng(5);
  const Eigen::MatrixXd l = random_matrix(rng, 10, 10);
  const Eigen::MatrixXd x = l * l.transpose() + Eigen::MatrixXd::Identity(10, 10);
  const Eigen::MatrixXd b = random_matrix(rng, 3, 10);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  const double beta = estimate_infsup(sparse(x), sparse(b), sparse(m));
  EXPECT_GT(beta, 0.0);
  EXPECT_NEAR(estimate_infsup(sparse(x), sparse(3.0 * b), sparse(m)), 3.0 * beta, 1e-10);
  EXPECT_NEAR(estimate_infsup(sparse(4.0 * x), sparse(b), sparse(m)), beta / 2.0, 1e-10);
  EXPECT_NEAR(estimate_infsup(sparse(x), sparse(b), sparse(4.0 * m)), beta / 2.0, 1e-10);
}

TEST(InfSup, MeanRowRestrictsToComplement) {
  // The constant multiplier is invisible to b; without the restriction beta = 0.
  Eigen::MatrixXd b(2, 3);
  b << 1, -1, 0, -1, 1, 0;
  Eigen::VectorXd mean(2);
  mean << 0.5, 0.5;
  const SparseMatrix x = sparse(Eigen::MatrixXd::Identity(3, 3)), m = sparse(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_NEAR(estimate_infsup(x, sparse(b), m), 0.0, 1e-7);
  EXPECT_NEAR(estimate_infsup(x, sparse(b), m, mean), 2.0, 1e-12);
}

TEST(InfSup, DenseLimitEnforced) {
  const SparseMatrix x = sparse(Eigen::MatrixXd::Identity(4, 4)), b = sparse(Eigen::MatrixXd::Ones(1, 4));
  try {
    estimate_infsup(x, b, sparse(Eigen::MatrixXd::Identity(1, 1)), std::nullopt, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDenseFeasible);
  }
}

TEST(Kernel, BasisIsOrthonormalAndAnnihilated) {
  std::mt19937 rng(9);
  const Eigen::MatrixXd b = random_matrix(rng, 3, 7);
  const Eigen::MatrixXd z = kernel_basis(sparse(b));
  EXPECT_EQ(z.cols(), 4);
  EXPECT_LT((b * z).norm(), 1e-13);
  EXPECT_LT((z.transpose() * z - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-13);
}

TEST(Garding, DiagonalExample) {
  // Kernel of b = [1 0 0] is span(e1, e2); a + xi r restricted there is diag(1 + xi, 2).
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, 3);
  b(0, 0) = 1;
  const Eigen::Vector3d ad(5, 1, 2), rd(0, 1, 0);
  const SparseMatrix a = sparse(ad.asDiagonal().toDenseMatrix()), r = sparse(rd.asDiagonal().toDenseMatrix());
  const SparseMatrix x = sparse(Eigen::MatrixXd::Identity(3, 3));
  const Eigen::MatrixXd z = kernel_basis(sparse(b));
  EXPECT_NEAR(estimate_garding(a, r, x, z, 0.0).alpha, 1.0, 1e-12);
  EXPECT_NEAR(estimate_garding(a, r, x, z, 0.5).alpha, 1.5, 1e-12);
  EXPECT_NEAR(estimate_garding(a, r, x, z, 3.0).alpha, 2.0, 1e-12);
  EXPECT_EQ(estimate_garding(a, r, x, z, 0.0).kernel_dim, 2);
}

TEST(Garding, EmptyKernel) {
  const SparseMatrix i = sparse(Eigen::MatrixXd::Identity(2, 2));
  const GardingEstimate e = estimate_garding(i, i, i, Eigen::MatrixXd(2, 0), 1.0);
  EXPECT_TRUE(e.empty_kernel);
  EXPECT_TRUE(std::isinf(e.alpha));
}

TEST(MatrixMarket, ReadsSymmetricFiles) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4.0\n2 1 -1.5\n");
  const Eigen::MatrixXd m(read_matrix_market(in));
  EXPECT_EQ(m(0, 0), 4.0);
  EXPECT_EQ(m(0, 1), -1.5);
  EXPECT_EQ(m(1, 0), -1.5);
  EXPECT_EQ(m(1, 1), 0.0);
}
