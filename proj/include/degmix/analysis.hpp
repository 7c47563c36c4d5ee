#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "degmix/assembly.hpp"
#include "degmix/problems.hpp"
#include "degmix/timestep.hpp"

namespace degmix {

/// Squared error quantities of a time series.
///
///   max_R  = max_n <R e^n, e^n>                    (n = 1..N)
///   l2_X   = dt sum_n |e^n|_X^2
///   l2_M   = dt sum_n |lambda(t_n) - lambda^n|_M^2
///   dt_R   = dt sum_k <R d^k, d^k>, d^k = u_t(t_k) - (u^k - u^{k-1}) / dt
///
/// rel_E and rel_H are percentages 100 * sum |err|^2 / sum |exact|^2 over
/// the time steps (eddy model only).
struct ErrorNorms {
  double max_R = 0.0;
  double l2_X = 0.0;
  double l2_M = 0.0;
  double dt_R = 0.0;
  std::optional<double> rel_E;
  std::optional<double> rel_H;
};

/// Errors against the exact solution, integrated by quadrature with the
/// exact fields evaluated pointwise.
ErrorNorms compute_errors(const TimeSeriesSolution& solution, const problems::ManufacturedCase& c,
                          const OperatorSet& ops);

/// max_n e_n^T G e_n over the given series.
double max_energy(const SparseMatrix& gram, std::span<const Eigen::VectorXd> series);
/// dt * sum_n e_n^T G e_n over the given series.
double time_l2(const SparseMatrix& gram, std::span<const Eigen::VectorXd> series, double dt);

/// X-orthogonal projection error |w - Pi_h w|_X of the exact primal field
/// at each time in `times`. Throws NotDenseFeasible above `max_dofs`.
std::vector<double> best_approximation(const OperatorSet& ops, const problems::ManufacturedCase& c,
                                       std::span<const double> times,
                                       int max_dofs = 3000);

/// X-norm of (exact(t) - discrete) for a full coefficient vector of the
/// primal space.
double primal_error_x(const OperatorSet& ops, const problems::ManufacturedCase& c,
                      const Eigen::VectorXd& full, double t);

/// Least-squares slope of log(error) against log(h). Throws TooFewLevels
/// below three levels; returns NaN when an error is not positive.
double fit_rate(std::span<const double> h, std::span<const double> errors);

struct LevelResult {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  ErrorNorms errors;
  std::optional<double> beta_h;
  std::optional<double> alpha_h;
  double max_constraint_violation = 0.0;  // max_n |B u^n - g| / (1 + |u^n|)
  double max_residual = 0.0;
  double max_multiplier_norm = 0.0;       // max_n |lambda^n|_M
  double max_primal_norm = 0.0;           // max_n |u^n| (Euclidean)
};

struct ConvergenceReport {
  std::vector<LevelResult> levels;
  std::map<std::string, double> rates;
  std::map<std::string, double> thresholds;
  std::map<std::string, bool> passed;

  bool all_passed() const;
};

/// Column values of one level in the order of the CSV schema (rooted norms).
std::map<std::string, std::optional<double>> rooted_columns(const LevelResult& level);

/// Fills rates (when at least three levels exist) and pass flags.
void finalize_report(ConvergenceReport& report);

}  // namespace degmix
