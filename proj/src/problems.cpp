#include "degmix/problems.hpp"

#include <cmath>
#include <numbers>

namespace degmix::problems {

namespace {

constexpr double kPi = std::numbers::pi;

// g(s) = s^2 (1-s)^2 and derivatives.
struct UnitProfile {
  static double f(double s) { return s * s * (1 - s) * (1 - s); }
  static double d1(double s) { return 2 * s * (1 - s) * (1 - 2 * s); }
  static double d2(double s) { return 2 * (1 - 6 * s + 6 * s * s); }
  static double d3(double s) { return 12 * (2 * s - 1); }
};

// G(s) = s^2 (3-s)^2 and derivatives.
struct WideProfile {
  static double f(double s) { return s * s * (3 - s) * (3 - s); }
  static double d1(double s) { return 18 * s - 18 * s * s + 4 * s * s * s; }
  static double d2(double s) { return 18 - 36 * s + 12 * s * s; }
  static double d3(double s) { return 24 * s - 36; }
};

// Stream-function velocity curl(scale * P(x) P(y)) and its derivatives.
template <typename P>
struct CurlOfProduct {
  double scale;

  Eigen::Vector2d value(const Eigen::Vector2d& p) const {
    const double x = p.x(), y = p.y();
    return scale * Eigen::Vector2d(P::f(x) * P::d1(y), -P::d1(x) * P::f(y));
  }
  Eigen::Matrix2d grad(const Eigen::Vector2d& p) const {
    const double x = p.x(), y = p.y();
    Eigen::Matrix2d g;
    g << P::d1(x) * P::d1(y), P::f(x) * P::d2(y), -P::d2(x) * P::f(y), -P::d1(x) * P::d1(y);
    return scale * g;
  }
  Eigen::Vector2d laplacian(const Eigen::Vector2d& p) const {
    const double x = p.x(), y = p.y();
    return scale * Eigen::Vector2d(P::d2(x) * P::d1(y) + P::f(x) * P::d3(y),
                                   -(P::d3(x) * P::f(y) + P::d1(x) * P::d2(y)));
  }
  // rot = d_x v_2 - d_y v_1 = -Lap(stream function).
  double rot(const Eigen::Vector2d& p) const {
    const double x = p.x(), y = p.y();
    return -scale * (P::d2(x) * P::f(y) + P::f(x) * P::d2(y));
  }
};

}  // namespace

ManufacturedCase stokes_case(double nu, double T) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "viscosity must be positive");
  ManufacturedCase c;
  c.name = "stokes";
  c.instance = Instance::Stokes;
  c.domain = Rectangle{0.0, 0.0, 1.0, 1.0};
  c.coefficients.nu = nu;
  c.T = T;
  const CurlOfProduct<UnitProfile> w{1.0};
  c.u = [w](const Eigen::Vector2d& p, double t) -> Eigen::Vector2d {
    return std::sin(kPi * t) * w.value(p);
  };
  c.u_t = [w](const Eigen::Vector2d& p, double t) -> Eigen::Vector2d {
    return kPi * std::cos(kPi * t) * w.value(p);
  };
  c.grad_u = [w](const Eigen::Vector2d& p, double t) -> Eigen::Matrix2d {
    return std::sin(kPi * t) * w.grad(p);
  };
  c.rot_u = [w](const Eigen::Vector2d& p, double t) { return std::sin(kPi * t) * w.rot(p); };
  c.multiplier = [](const Eigen::Vector2d& p, double t) { return std::sin(kPi * t) * (p.x() - 0.5); };
  c.grad_multiplier = [](const Eigen::Vector2d&, double t) -> Eigen::Vector2d {
    return Eigen::Vector2d(std::sin(kPi * t), 0.0);
  };
  c.h0 = [](const Eigen::Vector2d&, double) { return 0.0; };
  c.source.vector = [w, nu](const Eigen::Vector2d& p, double t, Subdomain) -> Eigen::Vector2d {
    const double ct = kPi * std::cos(kPi * t);
    return ct * w.value(p) - nu * std::sin(kPi * t) * w.laplacian(p) + Eigen::Vector2d(ct, 0.0);
  };
  return c;
}

ManufacturedCase eddy2d_case(const Coefficients& k, double T) {
  if (!(k.sigma > 0.0) || !(k.mu_mag > 0.0) || !(k.epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "eddy coefficients must be positive");
  }
  ManufacturedCase c;
  c.name = "eddy2d";
  c.instance = Instance::Eddy2d;
  c.domain = Rectangle{0.0, 0.0, 3.0, 3.0};
  c.conductor = Rectangle{1.0, 1.0, 2.0, 2.0};
  c.coefficients = k;
  c.T = T;
  const CurlOfProduct<WideProfile> w{0.5};
  c.u = [w](const Eigen::Vector2d& p, double t) -> Eigen::Vector2d {
    return std::sin(kPi * t) * w.value(p);
  };
  c.u_t = [w](const Eigen::Vector2d& p, double t) -> Eigen::Vector2d {
    return kPi * std::cos(kPi * t) * w.value(p);
  };
  c.grad_u = [w](const Eigen::Vector2d& p, double t) -> Eigen::Matrix2d {
    return std::sin(kPi * t) * w.grad(p);
  };
  c.rot_u = [w](const Eigen::Vector2d& p, double t) { return std::sin(kPi * t) * w.rot(p); };
  c.multiplier = [](const Eigen::Vector2d&, double) { return 0.0; };
  c.grad_multiplier = [](const Eigen::Vector2d&, double) -> Eigen::Vector2d {
    return Eigen::Vector2d::Zero();
  };
  c.h0 = [](const Eigen::Vector2d&, double) { return 0.0; };
  const double sigma = k.sigma, mu = k.mu_mag;
  c.source.vector = [w, sigma](const Eigen::Vector2d& p, double t, Subdomain s) -> Eigen::Vector2d {
    if (s != Subdomain::Conductor) return Eigen::Vector2d::Zero();
    return sigma * kPi * std::cos(kPi * t) * w.value(p);
  };
  c.source.rot = [w, mu](const Eigen::Vector2d& p, double t, Subdomain) {
    return std::sin(kPi * t) * w.rot(p) / mu;
  };
  return c;
}

ManufacturedCase case_by_name(const std::string& name, const Coefficients& coeffs, double T) {
  if (name == "stokes") return stokes_case(coeffs.nu, T);
  if (name == "eddy2d") return eddy2d_case(coeffs, T);
  throw Error(ErrorCode::InvalidArgument, "unknown case '" + name + "'");
}

RecoveredFields recover_fields(const TimeSeriesSolution& solution, const ManufacturedCase& c,
                               const FeSpace& field_space) {
  if (c.instance != Instance::Eddy2d || field_space.kind != SpaceKind::Edge1) {
    throw Error(ErrorCode::StokesInstance, "field recovery is defined for the eddy model only");
  }
  const TriMesh& mesh = *field_space.mesh;
  const double dt = solution.grid.dt();
  const int steps = static_cast<int>(solution.u.size());
  RecoveredFields out;
  out.E.resize(steps);
  out.H.resize(steps);
  for (int k = 0; k < steps; ++k) {
    out.E[k] = k == 0 ? Eigen::VectorXd::Zero(solution.u[0].size())
                      : ((solution.u[k] - solution.u[k - 1]) / dt).eval();
    const Eigen::VectorXd full = field_space.to_full(solution.u[k]);
    Eigen::VectorXd h(mesh.num_cells());
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
      const auto g = geometry_of(mesh, cell);
      const Eigen::Vector3d rots = edge1_curl(g, mesh.cells[cell]);
      const int* dofs = field_space.dofs_of(cell);
      double rot = 0.0;
      for (int i = 0; i < 3; ++i) rot += full(dofs[i]) * rots(i);
      h(cell) = rot / c.coefficients.mu_mag - c.h0(mesh.centroid(cell), solution.grid.t(k));
    }
    out.H[k] = h;
  }
  return out;
}

}  // namespace degmix::problems
