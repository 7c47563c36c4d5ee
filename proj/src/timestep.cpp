#include "degmix/timestep.hpp"

#include <optional>
#include <string>

#include "degmix/saddle.hpp"

namespace degmix {

TimeSeriesSolution run(const OperatorSet& ops, const TimeData& data, const Eigen::VectorXd& u0,
                       const TimeGrid& grid) {
  if (grid.N < 1 || !(grid.T > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time grid needs N >= 1 and T > 0");
  }
  const int n = static_cast<int>(ops.A.rows());
  const int m = static_cast<int>(ops.B.rows());
  if (ops.R.rows() != n || u0.size() != n || (m > 0 && ops.B.cols() != n)) {
    throw Error(ErrorCode::InvalidArgument, "operator and initial-data dimensions differ");
  }
  const double dt = grid.dt();
  const SparseMatrix system = ops.R + dt * ops.A;
  std::optional<SaddleSolver> factored;
  try {
    factored.emplace(system, ops.B, ops.mean_row);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("step 1: ") + e.what());
  }
  const SaddleSolver& solver = *factored;
  const SparseMatrix bt = ops.B.transpose();

  TimeSeriesSolution sol;
  sol.grid = grid;
  sol.u.reserve(grid.N + 1);
  sol.lambda.reserve(grid.N + 1);
  sol.u.push_back(u0);
  sol.lambda.push_back(Eigen::VectorXd::Zero(m));
  sol.residual.push_back(0.0);
  sol.constraint_violation.push_back(0.0);
  for (int step = 1; step <= grid.N; ++step) {
    const double t = grid.t(step);
    Eigen::VectorXd rhs = ops.R * sol.u.back() + bt * sol.lambda.back();
    if (data.load) rhs += dt * data.load(t);
    const Eigen::VectorXd g = data.constraint ? data.constraint(t) : Eigen::VectorXd::Zero(m);
    SaddleSolution s;
    try {
      s = solver.solve(rhs, g);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(step) + ": " + e.what());
    }
    sol.constraint_violation.push_back(m > 0 ? (ops.B * s.u - g).norm() : 0.0);
    sol.residual.push_back(s.residual);
    sol.u.push_back(std::move(s.u));
    sol.lambda.push_back(std::move(s.lambda));
  }
  return sol;
}

}  // namespace degmix
