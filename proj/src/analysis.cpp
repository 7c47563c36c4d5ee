#include "degmix/analysis.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

namespace degmix {

namespace {

// Quadrature tables for every cell of a space, built once per analysis.
struct TabulatedSpace {
  const FeSpace* space;
  std::vector<CellTabulation> cells;

  explicit TabulatedSpace(const FeSpace& s) : space(&s) {
    const auto& rule = default_quadrature();
    cells.reserve(s.mesh->num_cells());
    for (int c = 0; c < s.mesh->num_cells(); ++c) cells.push_back(tabulate(s, c, rule));
  }

  Eigen::VectorXd local(const Eigen::VectorXd& full, int cell) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(space->local_dofs);
    const int* d = space->dofs_of(cell);
    for (int i = 0; i < space->local_dofs; ++i) {
      if (d[i] >= 0) a(i) = full(d[i]);
    }
    return a;
  }
};

struct PrimalSq {
  double r = 0.0;  // R-weighted L2
  double x = 0.0;  // X norm
};

// Squared R- and X-norms of exact(t) - discrete, or of the discrete field
// alone when `exact_scale` is zero.
PrimalSq primal_norms(const TabulatedSpace& ts, const problems::ManufacturedCase& c,
                      const Coefficients& k, const Eigen::VectorXd& full, double t,
                      double exact_scale = 1.0) {
  const TriMesh& mesh = *ts.space->mesh;
  const bool stokes = ts.space->kind == SpaceKind::P1VectorBubble;
  PrimalSq out;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const CellTabulation& tab = ts.cells[cell];
    const Eigen::VectorXd a = ts.local(full, cell);
    const bool conductor = mesh.cell_subdomain[cell] == Subdomain::Conductor;
    for (int q = 0; q < tab.npts; ++q) {
      const Eigen::Vector2d& x = tab.points[q];
      Eigen::Vector2d val = Eigen::Vector2d::Zero();
      Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
      double rot = 0.0;
      for (int i = 0; i < tab.ndof; ++i) {
        val += a(i) * tab.vec[tab.at(i, q)];
        rot += a(i) * tab.rot(i, q);
        if (stokes) jac += a(i) * tab.jac[tab.at(i, q)];
      }
      const Eigen::Vector2d ev = exact_scale * c.u(x, t) - val;
      const double w = tab.weights[q];
      if (stokes) {
        out.r += w * ev.squaredNorm();
        out.x += w * (exact_scale * c.grad_u(x, t) - jac).squaredNorm();
      } else {
        const double er = exact_scale * c.rot_u(x, t) - rot;
        if (conductor) out.r += w * k.sigma * ev.squaredNorm();
        out.x += w * (ev.squaredNorm() + er * er);
      }
    }
  }
  return out;
}

// Squared R-norm of field(t) - discrete; with `plain_conductor_l2` the
// unweighted L2 norm over the conductor (eddy) is used instead.
double rate_norm(const TabulatedSpace& ts, const problems::SpaceTime<Eigen::Vector2d>& field,
                 const Coefficients& k, const Eigen::VectorXd& full, double t, double exact_scale,
                 bool plain_conductor_l2) {
  const TriMesh& mesh = *ts.space->mesh;
  const bool stokes = ts.space->kind == SpaceKind::P1VectorBubble;
  double sum = 0.0;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const bool conductor = mesh.cell_subdomain[cell] == Subdomain::Conductor;
    if (!stokes && !conductor) continue;
    const double weight = (stokes || plain_conductor_l2) ? 1.0 : k.sigma;
    const CellTabulation& tab = ts.cells[cell];
    const Eigen::VectorXd a = ts.local(full, cell);
    for (int q = 0; q < tab.npts; ++q) {
      Eigen::Vector2d val = Eigen::Vector2d::Zero();
      for (int i = 0; i < tab.ndof; ++i) val += a(i) * tab.vec[tab.at(i, q)];
      sum += tab.weights[q] * weight * (exact_scale * field(tab.points[q], t) - val).squaredNorm();
    }
  }
  return sum;
}

// Squared M-norm of exact multiplier(t) - discrete.
double multiplier_norm(const TabulatedSpace& ts, const problems::ManufacturedCase& c,
                       const Eigen::VectorXd& full, double t) {
  const TriMesh& mesh = *ts.space->mesh;
  const bool h1 = ts.space->kind == SpaceKind::InsulatorMultiplier;
  double sum = 0.0;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    if (!ts.space->active_cell[cell]) continue;
    const CellTabulation& tab = ts.cells[cell];
    const Eigen::VectorXd a = ts.local(full, cell);
    for (int q = 0; q < tab.npts; ++q) {
      const Eigen::Vector2d& x = tab.points[q];
      double val = 0.0;
      Eigen::Vector2d grad = Eigen::Vector2d::Zero();
      for (int i = 0; i < tab.ndof; ++i) {
        val += a(i) * tab.value(i, q);
        grad += a(i) * tab.grad[tab.at(i, q)];
      }
      const double e = c.multiplier(x, t) - val;
      double contrib = e * e;
      if (h1) contrib += (c.grad_multiplier(x, t) - grad).squaredNorm();
      sum += tab.weights[q] * contrib;
    }
  }
  return sum;
}

}  // namespace

ErrorNorms compute_errors(const TimeSeriesSolution& solution, const problems::ManufacturedCase& c,
                          const OperatorSet& ops) {
  const FeSpace& primal = *ops.primal;
  const FeSpace& mult = *ops.multiplier;
  const TabulatedSpace tp(primal), tm(mult);
  const Coefficients& k = ops.coefficients;
  const double dt = solution.grid.dt();
  const int steps = static_cast<int>(solution.u.size()) - 1;
  const TriMesh& mesh = *primal.mesh;
  ErrorNorms out;
  for (int n = 1; n <= steps; ++n) {
    const double t = solution.grid.t(n);
    const Eigen::VectorXd full = primal.to_full(solution.u[n]);
    const PrimalSq p = primal_norms(tp, c, k, full, t);
    out.max_R = std::max(out.max_R, p.r);
    out.l2_X += dt * p.x;
    out.l2_M += dt * multiplier_norm(tm, c, mult.to_full(solution.lambda[n]), t);
    const Eigen::VectorXd diff = primal.to_full((solution.u[n] - solution.u[n - 1]) / dt);
    out.dt_R += dt * rate_norm(tp, c.u_t, k, diff, t, 1.0, false);
  }
  if (ops.instance == Instance::Eddy2d) {
    const auto fields = problems::recover_fields(solution, c, primal);
    double e_err = 0.0, e_ref = 0.0, h_err = 0.0, h_ref = 0.0;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(primal.num_dofs);
    for (int n = 1; n <= steps; ++n) {
      const double t = solution.grid.t(n);
      e_err += rate_norm(tp, c.u_t, k, primal.to_full(fields.E[n]), t, 1.0, true);
      e_ref += rate_norm(tp, c.u_t, k, zero, t, 1.0, true);
      for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellTabulation& tab = tp.cells[cell];
        for (int q = 0; q < tab.npts; ++q) {
          const Eigen::Vector2d& x = tab.points[q];
          const double h = c.rot_u(x, t) / k.mu_mag - c.h0(x, t);
          const double e = h - fields.H[n](cell);
          h_err += tab.weights[q] * e * e;
          h_ref += tab.weights[q] * h * h;
        }
      }
    }
    out.rel_E = e_ref > 0.0 ? 100.0 * e_err / e_ref : 0.0;
    out.rel_H = h_ref > 0.0 ? 100.0 * h_err / h_ref : 0.0;
  }
  return out;
}

double max_energy(const SparseMatrix& gram, std::span<const Eigen::VectorXd> series) {
  double best = 0.0;
  for (const auto& e : series) best = std::max(best, e.dot(gram * e));
  return best;
}

double time_l2(const SparseMatrix& gram, std::span<const Eigen::VectorXd> series, double dt) {
  double sum = 0.0;
  for (const auto& e : series) sum += e.dot(gram * e);
  return dt * sum;
}

double primal_error_x(const OperatorSet& ops, const problems::ManufacturedCase& c,
                      const Eigen::VectorXd& full, double t) {
  const TabulatedSpace tp(*ops.primal);
  return std::sqrt(primal_norms(tp, c, ops.coefficients, full, t).x);
}

std::vector<double> best_approximation(const OperatorSet& ops, const problems::ManufacturedCase& c,
                                       std::span<const double> times, int max_dofs) {
  const FeSpace& space = *ops.primal;
  if (space.num_free() > max_dofs) {
    throw Error(ErrorCode::NotDenseFeasible, "projection diagnostic above the DOF limit");
  }
  const TabulatedSpace ts(space);
  const TriMesh& mesh = *space.mesh;
  const bool stokes = space.kind == SpaceKind::P1VectorBubble;
  Eigen::SimplicialLDLT<SparseMatrix> xfac(ops.X);
  if (xfac.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "X Gram matrix is not positive definite");
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    // (w, z)_X for every free basis function z.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.num_free());
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
      const CellTabulation& tab = ts.cells[cell];
      const int* d = space.dofs_of(cell);
      for (int q = 0; q < tab.npts; ++q) {
        const Eigen::Vector2d& x = tab.points[q];
        const double w = tab.weights[q];
        for (int i = 0; i < tab.ndof; ++i) {
          const int fi = space.free_index[d[i]];
          if (fi < 0) continue;
          if (stokes) {
            rhs(fi) += w * c.grad_u(x, t).cwiseProduct(tab.jac[tab.at(i, q)]).sum();
          } else {
            rhs(fi) += w * (c.u(x, t).dot(tab.vec[tab.at(i, q)]) + c.rot_u(x, t) * tab.rot(i, q));
          }
        }
      }
    }
    const Eigen::VectorXd proj = xfac.solve(rhs);
    out.push_back(std::sqrt(primal_norms(ts, c, ops.coefficients, space.to_full(proj), t).x));
  }
  return out;
}

double fit_rate(std::span<const double> h, std::span<const double> errors) {
  if (h.size() < 3 || errors.size() != h.size()) {
    throw Error(ErrorCode::TooFewLevels, "rate fitting needs at least three levels");
  }
  const int n = static_cast<int>(h.size());
  Eigen::VectorXd lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !(h[i] > 0.0) || !std::isfinite(errors[i])) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    lx(i) = std::log(h[i]);
    ly(i) = std::log(errors[i]);
  }
  const double mx = lx.mean(), my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "rate fitting needs distinct h values");
  return ((lx.array() - mx) * (ly.array() - my)).sum() / sxx;
}

bool ConvergenceReport::all_passed() const {
  for (const auto& [key, ok] : passed) {
    if (!ok) return false;
  }
  return true;
}

std::map<std::string, std::optional<double>> rooted_columns(const LevelResult& level) {
  const auto& e = level.errors;
  std::map<std::string, std::optional<double>> cols;
  cols["err_u_maxR"] = std::sqrt(e.max_R);
  cols["err_u_l2X"] = std::sqrt(e.l2_X);
  cols["err_lambda_l2M"] = std::sqrt(e.l2_M);
  cols["err_dtu"] = std::sqrt(e.dt_R);
  cols["rel_E_pct"] = e.rel_E;
  cols["rel_H_pct"] = e.rel_H;
  cols["beta_h"] = level.beta_h;
  cols["alpha_h"] = level.alpha_h;
  return cols;
}

void finalize_report(ConvergenceReport& report) {
  for (std::size_t i = 1; i < report.levels.size(); ++i) {
    if (!(report.levels[i].h < report.levels[i - 1].h)) {
      throw Error(ErrorCode::InvalidArgument, "levels must be strictly decreasing in h");
    }
  }
  report.rates.clear();
  report.passed.clear();
  if (report.levels.size() < 3) return;
  std::vector<double> h;
  for (const auto& l : report.levels) h.push_back(l.h);
  for (const char* key : {"err_u_maxR", "err_u_l2X", "err_lambda_l2M", "err_dtu", "rel_E_pct", "rel_H_pct"}) {
    std::vector<double> e;
    bool present = true;
    for (const auto& l : report.levels) {
      const auto v = rooted_columns(l).at(key);
      if (!v) {
        present = false;
        break;
      }
      e.push_back(*v);
    }
    if (present) report.rates[key] = fit_rate(h, e);
  }
  for (const auto& [key, threshold] : report.thresholds) {
    auto it = report.rates.find(key);
    report.passed[key] = it != report.rates.end() && it->second >= threshold;
  }
}

}  // namespace degmix
