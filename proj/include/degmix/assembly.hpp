#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>

#include <Eigen/Sparse>

#include "degmix/fe_space.hpp"

namespace degmix {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Piecewise-constant coefficients. Conductivity and permittivity act on
/// their own subdomain only.
struct Coefficients {
  double nu = 1.0;
  double sigma = 1.0;
  double epsilon = 1.0;
  double mu_mag = 1.0;
};

enum class Instance { Stokes, Eddy2d };

/// Discrete operators of one problem instance, indexed by free DOFs.
///
/// `X` and `M` are the Gram matrices of the primal and multiplier norms
/// (H1 seminorm / L2 for Stokes, H(curl) / H1 of the insulator for the
/// eddy model). `mean_row` is set when the multiplier carries a zero-mean
/// constraint.
struct OperatorSet {
  Instance instance = Instance::Stokes;
  SparseMatrix R;
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix X;
  SparseMatrix M;
  std::optional<Eigen::VectorXd> mean_row;
  Coefficients coefficients;
  std::shared_ptr<const FeSpace> primal;
  std::shared_ptr<const FeSpace> multiplier;
};

OperatorSet assemble_stokes(std::shared_ptr<const FeSpace> velocity,
                            std::shared_ptr<const FeSpace> pressure, double nu);

OperatorSet assemble_eddy2d(std::shared_ptr<const FeSpace> field,
                            std::shared_ptr<const FeSpace> multiplier, const Coefficients& coeffs);

/// Source data for load vectors. Unused parts may stay empty. The `rot` part
/// contributes the weak term of a curl-type source, int f_rot * rot(v).
struct Source {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double, Subdomain)> vector;
  std::function<double(const Eigen::Vector2d&, double, Subdomain)> rot;
  std::function<double(const Eigen::Vector2d&, double, Subdomain)> scalar;
};

/// Load vector on the free DOFs of `space` at time `t`.
Eigen::VectorXd assemble_load(const FeSpace& space, const Source& f, double t);

void write_matrix_market(std::ostream& out, const SparseMatrix& m);

}  // namespace degmix
