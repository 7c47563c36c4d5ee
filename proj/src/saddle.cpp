#include "degmix/saddle.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

namespace degmix {

SaddleSolver::SaddleSolver(const SparseMatrix& a, const SparseMatrix& b,
                           const std::optional<Eigen::VectorXd>& mean_row)
    : n_(static_cast<int>(a.rows())), m_(static_cast<int>(b.rows())), bordered_(mean_row.has_value()) {
  if (a.cols() != n_ || (m_ > 0 && b.cols() != n_)) {
    throw Error(ErrorCode::InvalidArgument, "saddle block dimensions are inconsistent");
  }
  if (bordered_ && mean_row->size() != m_) {
    throw Error(ErrorCode::InvalidArgument, "mean row length must match the multiplier size");
  }
  const int size = n_ + m_ + (bordered_ ? 1 : 0);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nonZeros() + 2 * b.nonZeros() + (bordered_ ? 2 * m_ : 0));
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < b.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(b, k); it; ++it) {
      t.emplace_back(n_ + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), n_ + it.row(), it.value());
    }
  }
  if (bordered_) {
    for (int i = 0; i < m_; ++i) {
      if ((*mean_row)(i) == 0.0) continue;
      t.emplace_back(n_ + m_, n_ + i, (*mean_row)(i));
      t.emplace_back(n_ + i, n_ + m_, (*mean_row)(i));
    }
  }
  k_.resize(size, size);
  k_.setFromTriplets(t.begin(), t.end());
  k_.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
  if (size == 0) return;
  lu_->compute(k_);
  if (lu_->info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "block factorization failed: " + lu_->lastErrorMessage());
  }
}

SaddleSolution SaddleSolver::solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  if (f.size() != n_ || g.size() != m_) {
    throw Error(ErrorCode::InvalidArgument, "right-hand side sizes do not match the system");
  }
  const int size = static_cast<int>(k_.rows());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  rhs.head(n_) = f;
  rhs.segment(n_, m_) = g;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(size);
  double rel = 0.0;
  const double scale = std::max(rhs.norm(), std::numeric_limits<double>::min());
  if (size > 0) {
    x = lu_->solve(rhs);
    Eigen::VectorXd r = rhs - k_ * x;
    rel = r.norm() / scale;
    // A few sweeps of iterative refinement recover digits lost to pivoting.
    for (int sweep = 0; sweep < 3 && rel > 1e-3 * kResidualTolerance; ++sweep) {
      x += lu_->solve(r);
      r = rhs - k_ * x;
      rel = r.norm() / scale;
    }
    if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite block solution");
    if (rel > kResidualTolerance) {
      std::ostringstream os;
      os << "relative residual " << rel << " exceeds " << kResidualTolerance;
      throw Error(ErrorCode::ResidualTooLarge, os.str());
    }
  }
  SaddleSolution s;
  s.u = x.head(n_);
  s.lambda = x.segment(n_, m_);
  s.residual = rel;
  s.mean_multiplier = bordered_ ? x(n_ + m_) : 0.0;
  return s;
}

SaddleSolution solve(const BlockSaddleSystem& system) {
  SaddleSolver solver(system.a, system.b, system.mean_row);
  return solver.solve(system.f, system.g);
}

namespace {

void require_dense_feasible(int dofs, int max_dofs) {
  if (dofs > max_dofs) {
    std::ostringstream os;
    os << dofs << " DOFs exceed the dense probe limit " << max_dofs;
    throw Error(ErrorCode::NotDenseFeasible, os.str());
  }
}

}  // namespace

double estimate_infsup(const SparseMatrix& x, const SparseMatrix& b, const SparseMatrix& m,
                       const std::optional<Eigen::VectorXd>& mean_row, int max_dofs) {
  const int n = static_cast<int>(x.rows()), nm = static_cast<int>(b.rows());
  require_dense_feasible(n + nm, max_dofs);
  if (b.cols() != n || m.rows() != nm || m.cols() != nm) {
    throw Error(ErrorCode::InvalidArgument, "inf-sup probe dimensions are inconsistent");
  }
  Eigen::SimplicialLDLT<SparseMatrix> xfac(x);
  if (xfac.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "primal inner-product matrix is not positive definite");
  }
  const Eigen::MatrixXd bt = Eigen::MatrixXd(b.transpose());
  const Eigen::MatrixXd xinv_bt = xfac.solve(bt);
  Eigen::MatrixXd s = Eigen::MatrixXd(b) * xinv_bt;
  Eigen::MatrixXd mm = Eigen::MatrixXd(m);
  if (mean_row) {
    // Orthonormal basis of {q : mean_row . q = 0}.
    const Eigen::MatrixXd mean_col = *mean_row;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(mean_col);
    const Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd y = q.rightCols(nm - 1);
    s = y.transpose() * s * y;
    mm = y.transpose() * mm * y;
  }
  if (s.rows() == 0) return std::numeric_limits<double>::infinity();
  s = 0.5 * (s + s.transpose()).eval();
  mm = 0.5 * (mm + mm.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, mm, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "multiplier inner-product matrix is not positive definite");
  }
  return std::sqrt(std::max(0.0, eig.eigenvalues()(0)));
}

Eigen::MatrixXd kernel_basis(const SparseMatrix& b, int max_dofs) {
  const int n = static_cast<int>(b.cols()), m = static_cast<int>(b.rows());
  require_dense_feasible(n + m, max_dofs);
  if (m == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(b.transpose()));
  const int rank = static_cast<int>(qr.rank());
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - rank);
}

GardingEstimate estimate_garding(const SparseMatrix& a, const SparseMatrix& r,
                                 const SparseMatrix& x, const Eigen::MatrixXd& kernel, double xi) {
  GardingEstimate est;
  est.xi = xi;
  est.kernel_dim = static_cast<int>(kernel.cols());
  if (kernel.cols() == 0) {
    est.empty_kernel = true;
    est.alpha = std::numeric_limits<double>::infinity();
    return est;
  }
  const SparseMatrix op = a + xi * r;
  Eigen::MatrixXd g = kernel.transpose() * (op * kernel);
  Eigen::MatrixXd h = kernel.transpose() * (x * kernel);
  g = 0.5 * (g + g.transpose()).eval();
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, h, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "norm matrix restricted to the kernel is not definite");
  }
  est.alpha = eig.eigenvalues()(0);
  return est;
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw Error(ErrorCode::InvalidArgument, "missing MatrixMarket banner");
  }
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || (field != "real" && field != "integer")) {
    throw Error(ErrorCode::InvalidArgument, "only real coordinate matrices are supported");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw Error(ErrorCode::InvalidArgument, "unsupported MatrixMarket symmetry " + symmetry);
  }
  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  std::istringstream header(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols >> nnz)) throw Error(ErrorCode::InvalidArgument, "bad size line");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(symmetric ? 2 * nnz : nnz);
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols) {
      throw Error(ErrorCode::InvalidArgument, "bad MatrixMarket entry");
    }
    t.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) t.emplace_back(j - 1, i - 1, v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace degmix
