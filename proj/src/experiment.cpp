#include "degmix/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "degmix/saddle.hpp"
#include "degmix/vtk.hpp"

namespace degmix {

namespace {

const char* const kCsvColumns[] = {"err_u_maxR", "err_u_l2X", "err_lambda_l2M", "err_dtu",
                                   "rel_E_pct",  "rel_H_pct", "beta_h",         "alpha_h"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

nlohmann::json to_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

struct LevelSetup {
  problems::ManufacturedCase mcase;
  std::shared_ptr<const OperatorSet> ops;
  Eigen::VectorXd u0;
  TimeGrid grid;
  int n = 0;
};

LevelSetup setup_level(const ExperimentConfig& config, int level) {
  LevelSetup s;
  s.mcase = problems::case_by_name(config.case_name, config.coefficients, config.T);
  s.n = config.n << level;
  s.grid = TimeGrid{config.T, config.N << level};
  auto mesh = std::make_shared<const TriMesh>(
      structured_mesh(s.mcase.domain, s.n, s.mcase.conductor, config.pattern));
  if (s.mcase.instance == Instance::Stokes) {
    auto vel = std::make_shared<const FeSpace>(build_space(mesh, SpaceKind::P1VectorBubble));
    auto pre = std::make_shared<const FeSpace>(build_space(mesh, SpaceKind::P1, {false}));
    s.ops = std::make_shared<const OperatorSet>(assemble_stokes(vel, pre, config.coefficients.nu));
    const auto& u = s.mcase.u;
    s.u0 = vel->to_free(interpolate(*vel, VectorField([&u](const Eigen::Vector2d& p) {
      return u(p, 0.0);
    })));
  } else {
    auto field = std::make_shared<const FeSpace>(build_space(mesh, SpaceKind::Edge1));
    auto mult = std::make_shared<const FeSpace>(build_space(mesh, SpaceKind::InsulatorMultiplier));
    s.ops = std::make_shared<const OperatorSet>(assemble_eddy2d(field, mult, config.coefficients));
    s.u0 = Eigen::VectorXd::Zero(field->num_free());
  }
  return s;
}

}  // namespace

LevelRun run_level(const ExperimentConfig& config, int level) {
  const LevelSetup s = setup_level(config, level);
  const OperatorSet& ops = *s.ops;
  const problems::ManufacturedCase& mcase = s.mcase;
  TimeData data;
  data.load = [&](double t) { return assemble_load(*ops.primal, mcase.source, t); };

  LevelRun out;
  out.ops = s.ops;
  out.solution = run(ops, data, s.u0, s.grid);
  LevelResult& r = out.result;
  r.n = s.n;
  r.h = ops.primal->mesh->h;
  r.dt = s.grid.dt();
  r.errors = compute_errors(out.solution, mcase, ops);
  for (std::size_t k = 1; k < out.solution.u.size(); ++k) {
    const double unorm = out.solution.u[k].norm();
    r.max_constraint_violation =
        std::max(r.max_constraint_violation, out.solution.constraint_violation[k] / (1.0 + unorm));
    r.max_residual = std::max(r.max_residual, out.solution.residual[k]);
    r.max_primal_norm = std::max(r.max_primal_norm, unorm);
    const auto& lam = out.solution.lambda[k];
    r.max_multiplier_norm = std::max(r.max_multiplier_norm, std::sqrt(std::max(0.0, lam.dot(ops.M * lam))));
  }
  const int dense_size = static_cast<int>(ops.A.rows() + ops.B.rows());
  if (dense_size <= kDenseProbeLimit) {
    if (config.probe_infsup) r.beta_h = estimate_infsup(ops.X, ops.B, ops.M, ops.mean_row);
    if (config.probe_garding) {
      const auto est = estimate_garding(ops.A, ops.R, ops.X, kernel_basis(ops.B), config.xi);
      r.alpha_h = est.alpha;
    }
  }
  return out;
}

void write_rates_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "level,h,dt";
  for (const char* c : kCsvColumns) out << ',' << c;
  out << '\n';
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    const auto& lv = report.levels[l];
    const auto cols = rooted_columns(lv);
    out << l << ',' << fmt(lv.h) << ',' << fmt(lv.dt);
    for (const char* c : kCsvColumns) out << ',' << fmt(cols.at(c));
    out << '\n';
  }
}

void write_raw_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "level,h,dt,max_R,l2_X,l2_M,dt_R,rel_E_pct,rel_H_pct\n";
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    const auto& lv = report.levels[l];
    const auto& e = lv.errors;
    out << l << ',' << fmt(lv.h) << ',' << fmt(lv.dt) << ',' << fmt(e.max_R) << ',' << fmt(e.l2_X)
        << ',' << fmt(e.l2_M) << ',' << fmt(e.dt_R) << ',' << fmt(e.rel_E) << ',' << fmt(e.rel_H)
        << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentResult result;
  try {
    validate(config);
  } catch (const Error& e) {
    result.exit_code = kExitUsage;
    result.error = e.what();
    return result;
  }
  const std::filesystem::path out_dir = options.out_dir.value_or(config.out_dir);

  for (int l = 0; l < config.levels; ++l) {
    const double dt = config.T / (config.N << l);
    if ((1.0 + 2.0 * config.xi) * dt > 0.5) {
      std::ostringstream os;
      os << "level " << l << ": (1 + 2 xi) dt = " << (1.0 + 2.0 * config.xi) * dt
         << " exceeds 1/2; the time step may be too large for the error bounds";
      result.warnings.push_back(os.str());
    }
  }

  std::vector<LevelRun> runs(config.levels);
  try {
    const int jobs = std::max(1, options.jobs);
    for (int start = 0; start < config.levels; start += jobs) {
      std::vector<std::future<LevelRun>> batch;
      const int stop = std::min(config.levels, start + jobs);
      for (int l = start; l < stop; ++l) {
        batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                   [&config, l] { return run_level(config, l); }));
      }
      for (int l = start; l < stop; ++l) runs[l] = batch[l - start].get();
    }
  } catch (const Error& e) {
    const bool usage = e.code() == ErrorCode::ConfigParse || e.code() == ErrorCode::InvalidArgument;
    result.exit_code = usage ? kExitUsage : kExitSolver;
    result.error = e.what();
    return result;
  }

  ConvergenceReport& report = result.report;
  report.thresholds = config.thresholds;
  for (const auto& r : runs) report.levels.push_back(r.result);
  finalize_report(report);
  result.exit_code = report.all_passed() ? kExitPass : kExitRateFailure;

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "rates.csv");
    write_rates_csv(f, report);
  }
  {
    std::ofstream f(out_dir / "errors_raw.csv");
    write_raw_csv(f, report);
  }
  nlohmann::json summary;
  summary["case"] = config.case_name;
  summary["levels"] = nlohmann::json::array();
  for (const auto& lv : report.levels) {
    nlohmann::json j;
    j["n"] = lv.n;
    j["h"] = lv.h;
    j["dt"] = lv.dt;
    for (const auto& [k, v] : rooted_columns(lv)) j[k] = to_json(v);
    j["max_constraint_violation"] = lv.max_constraint_violation;
    j["max_residual"] = lv.max_residual;
    j["max_multiplier_norm"] = lv.max_multiplier_norm;
    summary["levels"].push_back(j);
  }
  summary["rates"] = nlohmann::json::object();
  for (const auto& [k, v] : report.rates) summary["rates"][k] = to_json(v);
  summary["thresholds"] = report.thresholds;
  summary["passed"] = report.passed;
  summary["status"] = result.exit_code == kExitPass ? "pass" : "fail";
  summary["warnings"] = result.warnings;
  {
    std::ofstream f(out_dir / "summary.json");
    f << summary.dump(2) << '\n';
  }

  if (options.vtk_every > 0) {
    std::filesystem::create_directories(out_dir / "vtk");
    for (int l = 0; l < config.levels; ++l) {
      const auto& run = runs[l];
      const int steps = run.solution.grid.N;
      for (int k = 0; k <= steps; ++k) {
        if (k % options.vtk_every != 0 && k != steps) continue;
        std::ofstream f(out_dir / "vtk" / ("level" + std::to_string(l) + "_step" + std::to_string(k) + ".vtk"));
        write_snapshot(f, *run.ops->primal, run.ops->primal->to_full(run.solution.u[k]),
                       *run.ops->multiplier, run.ops->multiplier->to_full(run.solution.lambda[k]),
                       run.solution.grid.t(k));
      }
    }
  }
  return result;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Backward-Euler mixed finite element refinement studies"};
  app.require_subcommand(1);
  auto* run_cmd = app.add_subcommand("run", "Run a refinement study from a config file");
  std::string config_path;
  RunOptions options;
  std::string out_dir;
  run_cmd->add_option("config", config_path, "key=value or JSON config")->required();
  run_cmd->add_option("--jobs", options.jobs, "levels solved concurrently (1 = serial)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--vtk-every", options.vtk_every, "write snapshots every m steps")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", out_dir, "output directory (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (!out_dir.empty()) options.out_dir = out_dir;

  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const ExperimentResult result = run_experiment(config, options);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (!result.error.empty()) {
    std::cerr << "error: " << result.error << '\n';
    return result.exit_code;
  }
  write_rates_csv(std::cout, result.report);
  for (const auto& [k, v] : result.report.rates) {
    std::cout << "rate " << k << " = " << v;
    auto t = result.report.thresholds.find(k);
    if (t != result.report.thresholds.end()) {
      std::cout << " (min " << t->second << ", " << (result.report.passed.at(k) ? "pass" : "FAIL") << ")";
    }
    std::cout << '\n';
  }
  return result.exit_code;
}

}  // namespace degmix
