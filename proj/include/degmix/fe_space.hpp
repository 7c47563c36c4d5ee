#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "degmix/elements.hpp"
#include "degmix/mesh.hpp"

namespace degmix {

enum class SpaceKind {
  P1,                   // continuous piecewise linear scalar
  P1VectorBubble,       // MINI velocity: (P1 + cell bubble)^2
  Edge1,                // lowest-order edge element (Whitney 1-forms)
  InsulatorMultiplier,  // P1 on insulator cells, one unknown per interface component
};

const char* to_string(SpaceKind kind);

struct BoundarySpec {
  bool zero_on_outer_boundary = true;
};

enum class EntityType { Vertex, Edge, Cell, InterfaceGroup };

struct DofEntity {
  EntityType type;
  int index;
  int component = 0;
};

/// Global finite-element space over a mesh.
///
/// DOFs are numbered over all entities ("full" numbering). Essential
/// conditions mark some DOFs constrained; operators and solution vectors
/// live on the free DOFs only, in increasing full-index order.
struct FeSpace {
  std::shared_ptr<const TriMesh> mesh;
  SpaceKind kind = SpaceKind::P1;
  int num_dofs = 0;
  int local_dofs = 0;
  // num_cells * local_dofs entries; -1 marks cells outside the space support.
  std::vector<int> cell_dofs;
  std::vector<bool> active_cell;
  std::vector<DofEntity> dof_entity;
  std::vector<int> free_dofs;
  std::vector<int> free_index;
  std::vector<int> constrained_dofs;
  Eigen::VectorXd prescribed;
  // Vertex sets of the interface components; each shares one DOF.
  std::vector<std::vector<int>> interface_groups;

  int num_free() const { return static_cast<int>(free_dofs.size()); }
  const int* dofs_of(int cell) const { return cell_dofs.data() + cell * local_dofs; }
  bool is_vector() const { return kind == SpaceKind::P1VectorBubble || kind == SpaceKind::Edge1; }

  Eigen::VectorXd to_free(const Eigen::VectorXd& full) const;
  /// Constrained entries take their prescribed values.
  Eigen::VectorXd to_full(const Eigen::VectorXd& free) const;
};

/// Throws MissingTag if the mesh lacks a subdomain the kind needs.
FeSpace build_space(std::shared_ptr<const TriMesh> mesh, SpaceKind kind,
                    const BoundarySpec& bc = {});

using ScalarField = std::function<double(const Eigen::Vector2d&)>;
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Applies the DOF functionals (point values, tangential edge moments) to a
/// field. The result uses the full numbering and ignores constraints.
Eigen::VectorXd interpolate(const FeSpace& space, const ScalarField& f);
Eigen::VectorXd interpolate(const FeSpace& space, const VectorField& f);

/// Basis functions of one cell tabulated at the physical quadrature points.
struct CellTabulation {
  CellGeometry<double> geometry;
  int ndof = 0;
  int npts = 0;
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  // Scalar kinds.
  Eigen::MatrixXd value;
  std::vector<Eigen::Vector2d> grad;
  // Vector kinds.
  std::vector<Eigen::Vector2d> vec;
  std::vector<Eigen::Matrix2d> jac;  // P1VectorBubble only; rows are components
  Eigen::MatrixXd rot;
  Eigen::MatrixXd div;

  int at(int i, int q) const { return i * npts + q; }
};

CellGeometry<double> geometry_of(const TriMesh& mesh, int cell);
CellTabulation tabulate(const FeSpace& space, int cell, const QuadratureRule<double>& rule);

/// Default rule for assembly and error integrals.
const QuadratureRule<double>& default_quadrature();

}  // namespace degmix
