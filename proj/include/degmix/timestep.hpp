#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "degmix/assembly.hpp"

namespace degmix {

/// Uniform partition t_n = n T / N of [0, T].
struct TimeGrid {
  double T = 1.0;
  int N = 1;

  double dt() const { return T / N; }
  double t(int n) const { return n * T / N; }
};

/// Load and constraint data as functions of time, on free DOFs.
struct TimeData {
  std::function<Eigen::VectorXd(double)> load;        // <f(t), v> for every free basis v
  std::function<Eigen::VectorXd(double)> constraint;  // <g(t), mu>; empty means zero
};

struct TimeSeriesSolution {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> u;       // n = 0..N
  std::vector<Eigen::VectorXd> lambda;  // n = 0..N, lambda[0] = 0
  std::vector<double> residual;         // block-system residual per step, entry 0 unused
  std::vector<double> constraint_violation;  // |B u^n - g(t_n)|
};

/// Backward Euler: for n = 1..N solve
///   (R + dt A) u^n + B^T lambda^n = dt f(t_n) + R u^{n-1} + B^T lambda^{n-1},
///   B u^n = g(t_n),
/// starting from u^0 = `u0` and lambda^0 = 0. The block matrix is factorized once.
TimeSeriesSolution run(const OperatorSet& ops, const TimeData& data, const Eigen::VectorXd& u0,
                       const TimeGrid& grid);

}  // namespace degmix
