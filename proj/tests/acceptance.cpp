// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degmix/experiment.hpp"
#include "degmix/saddle.hpp"

using namespace degmix;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// Constraint residuals of every acceptance run, checked by criterion 8.
std::vector<std::pair<std::string, double>> g_constraint_log;

void log_constraints(const std::string& tag, const TimeSeriesSolution& s) {
  double worst = 0.0;
  for (std::size_t k = 1; k < s.u.size(); ++k) {
    worst = std::max(worst, s.constraint_violation[k] / (1.0 + s.u[k].norm()));
  }
  g_constraint_log.emplace_back(tag, worst);
}

// ---------------------------------------------------------------------------
// Independent dense oracle for one Stokes step. Polynomials in barycentric
// coordinates are integrated exactly with
//   int_T l0^a l1^b l2^c = 2|T| a! b! c! / (a + b + c + 2)!.

using Exponent = std::array<int, 3>;
using Poly = std::map<Exponent, double>;

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

Poly multiply(const Poly& p, const Poly& q) {
  Poly r;
  for (const auto& [e1, c1] : p) {
    for (const auto& [e2, c2] : q) r[{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}] += c1 * c2;
  }
  return r;
}

double integrate(const Poly& p, double area) {
  double s = 0.0;
  for (const auto& [e, c] : p) {
    s += c * 2.0 * area * factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / factorial(e[0] + e[1] + e[2] + 2);
  }
  return s;
}

double evaluate(const Poly& p, const Eigen::Vector3d& l) {
  double s = 0.0;
  for (const auto& [e, c] : p) s += c * std::pow(l(0), e[0]) * std::pow(l(1), e[1]) * std::pow(l(2), e[2]);
  return s;
}

// Partial derivative with respect to barycentric coordinate k.
Poly derivative(const Poly& p, int k) {
  Poly r;
  for (const auto& [e, c] : p) {
    if (e[k] == 0) continue;
    Exponent d = e;
    --d[k];
    r[d] += c * e[k];
  }
  return r;
}

struct OracleResult {
  Eigen::VectorXd u_vertex;  // (vertex, component) -> value; zero on the boundary
  Eigen::VectorXd u_bubble;  // (cell, component)
  Eigen::VectorXd pressure;  // per vertex
};

OracleResult dense_stokes_step(const TriMesh& mesh, double nu, double dt,
                              const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) {
  const int nv = mesh.num_vertices(), nc = mesh.num_cells();
  const auto boundary = mesh.outer_boundary_vertices();
  std::vector<int> vmap(nv, -1);
  int nfree = 0;
  for (int v = 0; v < nv; ++v)
    if (!boundary[v]) vmap[v] = nfree++;
  const int nu_dofs = 2 * nfree + 2 * nc, np = nv;
  auto vel_index = [&](int cell, int local, int comp) {
    if (local == 3) return 2 * nfree + 2 * cell + comp;
    const int m = vmap[mesh.cells[cell][local]];
    return m < 0 ? -1 : 2 * m + comp;
  };
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nu_dofs + np + 1, nu_dofs + np + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu_dofs + np + 1);

  std::array<Poly, 4> basis;
  for (int i = 0; i < 3; ++i) {
    Exponent e{0, 0, 0};
    e[i] = 1;
    basis[i][e] = 1.0;
  }
  basis[3][{1, 1, 1}] = 27.0;

  const auto rule = quadrature_degree6();
  for (int c = 0; c < nc; ++c) {
    const auto& cv = mesh.cells[c];
    const Eigen::Vector2d p0 = mesh.vertices[cv[0]], p1 = mesh.vertices[cv[1]], p2 = mesh.vertices[cv[2]];
    Eigen::Matrix2d jac;
    jac.col(0) = p1 - p0;
    jac.col(1) = p2 - p0;
    const double area = 0.5 * jac.determinant();
    // grad l1, grad l2 are the rows of jac^{-1}; grad l0 = -(grad l1 + grad l2).
    const Eigen::Matrix2d inv = jac.inverse();
    std::array<Eigen::Vector2d, 3> g;
    g[1] = inv.row(0).transpose();
    g[2] = inv.row(1).transpose();
    g[0] = -(g[1] + g[2]);

    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double mass = integrate(multiply(basis[i], basis[j]), area);
        double stiff = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            stiff += g[k].dot(g[l]) * integrate(multiply(derivative(basis[i], k), derivative(basis[j], l)), area);
        for (int comp = 0; comp < 2; ++comp) {
          const int a = vel_index(c, i, comp), b = vel_index(c, j, comp);
          if (a >= 0 && b >= 0) K(a, b) += mass + dt * nu * stiff;
        }
      }
    }
    // b(v, q) = -int q div v; pressure basis is l_q.
    for (int i = 0; i < 4; ++i) {
      for (int comp = 0; comp < 2; ++comp) {
        const int a = vel_index(c, i, comp);
        if (a < 0) continue;
        for (int q = 0; q < 3; ++q) {
          double div = 0.0;
          for (int k = 0; k < 3; ++k) div += g[k](comp) * integrate(multiply(basis[q], derivative(basis[i], k)), area);
          const int row = nu_dofs + cv[q];
          K(row, a) -= div;
          K(a, row) -= div;
        }
      }
    }
    for (int q = 0; q < 3; ++q) {
      const double m = area / 3.0;
      K(nu_dofs + np, nu_dofs + cv[q]) += m;
      K(nu_dofs + cv[q], nu_dofs + np) += m;
    }
    for (std::size_t qp = 0; qp < rule.points.size(); ++qp) {
      const Eigen::Vector3d l = rule.points[qp];
      const Eigen::Vector2d x = l(0) * p0 + l(1) * p1 + l(2) * p2;
      const Eigen::Vector2d fx = f(x);
      const double w = 2.0 * area * rule.weights[qp];
      for (int i = 0; i < 4; ++i) {
        const double phi = evaluate(basis[i], l);
        for (int comp = 0; comp < 2; ++comp) {
          const int a = vel_index(c, i, comp);
          if (a >= 0) rhs(a) += dt * w * phi * fx(comp);
        }
      }
    }
  }
  const Eigen::VectorXd x = K.fullPivLu().solve(rhs);
  OracleResult r;
  r.u_vertex = Eigen::VectorXd::Zero(2 * nv);
  for (int v = 0; v < nv; ++v)
    if (vmap[v] >= 0) r.u_vertex.segment<2>(2 * v) = x.segment<2>(2 * vmap[v]);
  r.u_bubble = x.segment(2 * nfree, 2 * nc);
  r.pressure = x.segment(nu_dofs, np);
  return r;
}

Outcome criterion1(double& runtime) {
  Outcome o;
  const auto t0 = Clock::now();
  const double dt = 0.1, nu = 1.0;
  for (int n : {1, 2}) {
    ExperimentConfig cfg;
    cfg.case_name = "stokes";
    cfg.n = n;
    cfg.levels = 1;
    cfg.T = dt;
    cfg.N = 1;
    const LevelRun run = run_level(cfg, 0);
    const auto& ops = *run.ops;
    const auto c = problems::stokes_case(nu, dt);
    const TriMesh& mesh = *ops.primal->mesh;
    const OracleResult ref = dense_stokes_step(mesh, nu, dt, [&](const Eigen::Vector2d& x) {
      return c.source.vector(x, dt, Subdomain::Whole);
    });
    const Eigen::VectorXd u = ops.primal->to_full(run.solution.u[1]);
    const Eigen::VectorXd p = ops.multiplier->to_full(run.solution.lambda[1]);
    Eigen::VectorXd ours(u.size()), theirs(u.size());
    ours = u;
    theirs << ref.u_vertex, ref.u_bubble;
    const double eu = (ours - theirs).norm() / theirs.norm();
    const double ep = (p - ref.pressure).norm() / ref.pressure.norm();
    o.detail << " n=" << n << ": rel_u=" << eu << " rel_p=" << ep << " cells=" << mesh.num_cells();
    o.require(eu <= 1e-11 && ep <= 1e-11, "relative difference above 1e-11 on n=" + std::to_string(n));
    log_constraints("oracle n=" + std::to_string(n), run.solution);
  }
  runtime = seconds_since(t0);
  o.require(runtime < 1.0, "runtime >= 1 s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  Eigen::Matrix3d mass, stiff;
  mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  mass /= 24.0;
  stiff << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  stiff /= 2.0;
  const double em = (p1_mass_reference() - mass).cwiseAbs().maxCoeff();
  const double es = (p1_stiffness(reference_geometry()) - stiff).cwiseAbs().maxCoeff();
  o.detail << " mass=" << em << " stiffness=" << es;
  o.require(em <= 1e-14 && es <= 1e-14, "entry difference above 1e-14");
  return o;
}

struct Study {
  std::vector<LevelRun> runs;
  ConvergenceReport report;
  double seconds = 0.0;
};

Study run_study(const ExperimentConfig& cfg, const std::string& tag) {
  Study s;
  const auto t0 = Clock::now();
  for (int l = 0; l < cfg.levels; ++l) {
    s.runs.push_back(run_level(cfg, l));
    s.report.levels.push_back(s.runs.back().result);
    log_constraints(tag + " n=" + std::to_string(s.runs.back().result.n), s.runs.back().solution);
  }
  finalize_report(s.report);
  s.seconds = seconds_since(t0);
  return s;
}

ExperimentConfig stokes_study_config() {
  ExperimentConfig c;
  c.case_name = "stokes";
  c.n = 4;
  c.levels = 4;
  c.T = 1.0;
  c.N = 4;
  return c;
}

ExperimentConfig eddy_study_config() {
  ExperimentConfig c;
  c.case_name = "eddy2d";
  c.n = 3;
  c.levels = 4;
  c.T = 1.0;
  c.N = 4;
  return c;
}

void describe_rates(Outcome& o, const ConvergenceReport& r, std::initializer_list<const char*> keys) {
  for (const char* k : keys) o.detail << ' ' << k << '=' << r.rates.at(k);
}

Outcome criterion3(const Study& s) {
  Outcome o;
  describe_rates(o, s.report, {"err_u_l2X", "err_lambda_l2M", "err_u_maxR"});
  o.detail << " time=" << s.seconds << "s";
  for (const char* k : {"err_u_l2X", "err_lambda_l2M", "err_u_maxR"}) {
    o.require(s.report.rates.at(k) >= 0.9, std::string(k) + " rate < 0.9");
  }
  o.require(s.seconds < 180.0, "runtime >= 3 min");
  return o;
}

Outcome criterion4(const Study& s) {
  Outcome o;
  describe_rates(o, s.report, {"err_u_l2X", "rel_E_pct", "rel_H_pct"});
  o.detail << " time=" << s.seconds << "s";
  o.require(s.report.rates.at("err_u_l2X") >= 0.9, "err_u_l2X rate < 0.9");
  for (const char* k : {"rel_E_pct", "rel_H_pct"}) {
    o.require(s.report.rates.at(k) >= 0.8, std::string(k) + " slope < 0.8");
    for (std::size_t l = 1; l < s.report.levels.size(); ++l) {
      const auto prev = rooted_columns(s.report.levels[l - 1]).at(k);
      const auto cur = rooted_columns(s.report.levels[l]).at(k);
      o.require(prev && cur && *cur < *prev, std::string(k) + " not strictly decreasing");
    }
  }
  o.require(s.seconds < 300.0, "runtime >= 5 min");
  return o;
}

Outcome criterion5(const Study& s) {
  Outcome o;
  double worst = 0.0;
  for (const auto& run : s.runs) {
    const auto& r = run.result;
    const double ratio = r.max_multiplier_norm / (1.0 + r.max_primal_norm);
    worst = std::max(worst, ratio);
  }
  o.detail << " max |lambda|_M / (1 + max |u|) = " << worst;
  o.require(worst <= 1e-8, "multiplier above 1e-8 relative");
  return o;
}

Outcome criterion6(const Study& s) {
  Outcome o;
  describe_rates(o, s.report, {"err_dtu"});
  o.require(s.report.rates.at("err_dtu") >= 0.9, "err_dtu rate < 0.9");
  return o;
}

double relative_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

Outcome criterion7() {
  Outcome o;
  for (auto [name, base_n] : {std::pair<const char*, int>{"stokes", 4}, {"eddy2d", 3}}) {
    ExperimentConfig cfg;
    cfg.case_name = name;
    cfg.n = base_n;
    cfg.levels = 3;
    cfg.N = 4;
    cfg.probe_infsup = true;
    cfg.probe_garding = true;
    cfg.xi = 1.0;
    std::vector<double> beta, alpha;
    for (int l = 0; l < 3; ++l) {
      const LevelRun run = run_level(cfg, l);
      const auto& ops = *run.ops;
      const int dofs = static_cast<int>(ops.A.rows() + ops.B.rows());
      o.require(dofs <= kDenseProbeLimit, std::string(name) + " probe over the dense limit");
      o.require(run.result.beta_h.has_value() && run.result.alpha_h.has_value(),
                std::string(name) + " probe missing");
      if (!run.result.beta_h || !run.result.alpha_h) continue;
      beta.push_back(*run.result.beta_h);
      alpha.push_back(*run.result.alpha_h);
      if (cfg.case_name == "stokes") {
        const GardingEstimate g0 = estimate_garding(ops.A, ops.R, ops.X, kernel_basis(ops.B), 0.0);
        o.detail << " stokes n=" << run.result.n << " alpha(xi=0)-nu=" << g0.alpha - ops.coefficients.nu;
        o.require(std::abs(g0.alpha - ops.coefficients.nu) <= 1e-8, "Stokes alpha at xi=0 differs from nu");
      }
    }
    if (beta.size() != 3) continue;
    o.detail << ' ' << name << " beta=";
    for (double b : beta) o.detail << b << ';';
    o.detail << " alpha=";
    for (double a : alpha) o.detail << a << ';';
    o.require(relative_spread(beta) < 0.25 && relative_spread(alpha) < 0.25,
              std::string(name) + " probe varies by 25% or more");
    o.require(*std::min_element(beta.begin(), beta.end()) >= 1e-3 &&
                  *std::min_element(alpha.begin(), alpha.end()) >= 1e-3,
              std::string(name) + " probe below 1e-3");
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  double worst = 0.0;
  std::string where;
  for (const auto& [tag, v] : g_constraint_log) {
    if (v >= worst) {
      worst = v;
      where = tag;
    }
  }
  o.detail << " runs=" << g_constraint_log.size() << " worst=" << worst << " (" << where << ")";
  o.require(!g_constraint_log.empty() && worst <= 1e-9, "constraint residual above 1e-9 relative");
  return o;
}

Outcome criterion9() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "degmix_acceptance_determinism";
  fs::remove_all(root);
  for (const auto& cfg0 : {stokes_study_config(), eddy_study_config()}) {
    std::string bytes[2];
    for (int rep = 0; rep < 2; ++rep) {
      ExperimentConfig cfg = cfg0;
      cfg.levels = 3;
      cfg.thresholds = default_thresholds(cfg.case_name);
      cfg.out_dir = (root / (cfg.case_name + std::to_string(rep))).string();
      const ExperimentResult r = run_experiment(cfg, RunOptions{1, 0, std::nullopt});
      o.require(r.error.empty(), "run failed: " + r.error);
      std::ifstream in(fs::path(cfg.out_dir) / "rates.csv", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      bytes[rep] = ss.str();
    }
    o.detail << ' ' << cfg0.case_name << ": " << bytes[0].size() << " bytes";
    o.require(!bytes[0].empty() && bytes[0] == bytes[1], cfg0.case_name + " rates.csv differs");
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&failures](int id, const Outcome& o) {
    std::printf("criterion %d: %s%s\n", id, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  auto guarded = [&](int id, const std::function<Outcome()>& f) {
    try {
      report(id, f());
    } catch (const std::exception& e) {
      Outcome o;
      o.require(false, std::string("exception: ") + e.what());
      report(id, o);
    }
  };

  double c1_time = 0.0;
  guarded(1, [&] { return criterion1(c1_time); });
  guarded(2, [] { return criterion2(); });

  std::optional<Study> stokes, eddy;
  try {
    stokes = run_study(stokes_study_config(), "stokes");
  } catch (const std::exception& e) {
    std::printf("stokes study failed: %s\n", e.what());
  }
  try {
    eddy = run_study(eddy_study_config(), "eddy2d");
  } catch (const std::exception& e) {
    std::printf("eddy study failed: %s\n", e.what());
  }
  auto needs = [](const std::optional<Study>& s, const std::function<Outcome(const Study&)>& f) {
    return [&s, f] {
      if (!s) {
        Outcome o;
        o.require(false, "study did not run");
        return o;
      }
      return f(*s);
    };
  };
  guarded(3, needs(stokes, criterion3));
  guarded(4, needs(eddy, criterion4));
  guarded(5, needs(eddy, criterion5));
  guarded(6, needs(eddy, criterion6));
  guarded(7, [] { return criterion7(); });
  guarded(8, [] { return criterion8(); });
  guarded(9, [] { return criterion9(); });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
