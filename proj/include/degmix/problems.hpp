#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "degmix/assembly.hpp"
#include "degmix/mesh.hpp"
#include "degmix/timestep.hpp"

namespace degmix::problems {

template <typename R>
using SpaceTime = std::function<R(const Eigen::Vector2d&, double)>;

/// Manufactured problem: exact solution, its derivatives, and the source
/// that makes it satisfy the continuous equations.
struct ManufacturedCase {
  std::string name;
  Instance instance = Instance::Stokes;
  Rectangle domain;
  std::optional<Rectangle> conductor;
  Coefficients coefficients;
  double T = 1.0;

  SpaceTime<Eigen::Vector2d> u;
  SpaceTime<Eigen::Vector2d> u_t;
  SpaceTime<Eigen::Matrix2d> grad_u;  // rows are components
  SpaceTime<double> rot_u;
  SpaceTime<double> multiplier;
  SpaceTime<Eigen::Vector2d> grad_multiplier;
  // Background magnetic field H_0 of the eddy model.
  SpaceTime<double> h0;
  Source source;
};

/// Unit square, u = sin(pi t) curl psi with psi = x^2 (1-x)^2 y^2 (1-y)^2 and
/// multiplier P = sin(pi t) (x - 1/2). The multiplier enters under the time
/// derivative, so the source is f = u_t - nu Lap u + grad P_t.
ManufacturedCase stokes_case(double nu = 1.0, double T = 1.0);

/// Domain [0,3]^2 with conductor [1,2]^2, u = sin(pi t) curl phi with
/// phi = [x (3-x) y (3-y)]^2 / 2 and zero multiplier. The source is given in
/// weak form: sigma u_t on the conductor plus the rot-rot term.
ManufacturedCase eddy2d_case(const Coefficients& coeffs = {}, double T = 1.0);

/// Selects a case by name ("stokes" or "eddy2d").
ManufacturedCase case_by_name(const std::string& name, const Coefficients& coeffs, double T);

/// Electric field E_h^k = (u_h^k - u_h^{k-1}) / dt (free edge coefficients)
/// and magnetic field H_h^k = rot(u_h^k) / mu - H_0 per cell.
struct RecoveredFields {
  std::vector<Eigen::VectorXd> E;  // k = 1..N at index k; index 0 is zero
  std::vector<Eigen::VectorXd> H;  // k = 0..N, one value per cell
};

RecoveredFields recover_fields(const TimeSeriesSolution& solution, const ManufacturedCase& c,
                               const FeSpace& field_space);

}  // namespace degmix::problems
