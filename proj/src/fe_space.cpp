#include "degmix/fe_space.hpp"

#include <algorithm>
#include <numeric>

namespace degmix {

const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P1: return "P1";
    case SpaceKind::P1VectorBubble: return "P1VectorBubble";
    case SpaceKind::Edge1: return "Edge1";
    case SpaceKind::InsulatorMultiplier: return "InsulatorMultiplier";
  }
  return "Unknown";
}

Eigen::VectorXd FeSpace::to_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(num_free());
  for (int i = 0; i < num_free(); ++i) out(i) = full(free_dofs[i]);
  return out;
}

Eigen::VectorXd FeSpace::to_full(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out = prescribed;
  for (int i = 0; i < num_free(); ++i) out(free_dofs[i]) = free(i);
  return out;
}

const QuadratureRule<double>& default_quadrature() {
  static const QuadratureRule<double> rule = quadrature_degree6<double>();
  return rule;
}

CellGeometry<double> geometry_of(const TriMesh& mesh, int cell) {
  const auto& c = mesh.cells[cell];
  return cell_geometry<double>(mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]);
}

namespace {

// Vertex sets of the connected components of the interface edge graph.
std::vector<std::vector<int>> interface_components(const TriMesh& mesh) {
  std::vector<int> parent(mesh.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<bool> on_interface(mesh.num_vertices(), false);
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::Interface) continue;
    const auto& e = mesh.edges[be.edge];
    on_interface[e[0]] = on_interface[e[1]] = true;
    int a = find(e[0]), b = find(e[1]);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> group_of_root(mesh.num_vertices(), -1);
  std::vector<std::vector<int>> groups;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!on_interface[v]) continue;
    int r = find(v);
    if (group_of_root[r] < 0) {
      group_of_root[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of_root[r]].push_back(v);
  }
  return groups;
}

}  // namespace

FeSpace build_space(std::shared_ptr<const TriMesh> mesh_ptr, SpaceKind kind, const BoundarySpec& bc) {
  if (!mesh_ptr) throw Error(ErrorCode::InvalidArgument, "build_space needs a mesh");
  const TriMesh& mesh = *mesh_ptr;
  FeSpace s;
  s.mesh = mesh_ptr;
  s.kind = kind;
  const int nc = mesh.num_cells();
  const int nv = mesh.num_vertices();
  std::vector<bool> constrained;
  auto add_dof = [&](DofEntity ent, bool fixed) {
    s.dof_entity.push_back(ent);
    constrained.push_back(fixed);
    return static_cast<int>(s.dof_entity.size()) - 1;
  };
  const auto outer_vertex = mesh.outer_boundary_vertices();
  const auto outer_edge = mesh.outer_boundary_edges();
  s.active_cell.assign(nc, true);

  switch (kind) {
    case SpaceKind::P1: {
      s.local_dofs = 3;
      for (int v = 0; v < nv; ++v) {
        add_dof({EntityType::Vertex, v, 0}, bc.zero_on_outer_boundary && outer_vertex[v]);
      }
      for (int c = 0; c < nc; ++c) {
        for (int k = 0; k < 3; ++k) s.cell_dofs.push_back(mesh.cells[c][k]);
      }
      break;
    }
    case SpaceKind::P1VectorBubble: {
      s.local_dofs = 8;
      for (int v = 0; v < nv; ++v) {
        for (int comp = 0; comp < 2; ++comp) {
          add_dof({EntityType::Vertex, v, comp}, bc.zero_on_outer_boundary && outer_vertex[v]);
        }
      }
      for (int c = 0; c < nc; ++c) {
        for (int comp = 0; comp < 2; ++comp) add_dof({EntityType::Cell, c, comp}, false);
      }
      for (int c = 0; c < nc; ++c) {
        for (int comp = 0; comp < 2; ++comp) {
          for (int k = 0; k < 3; ++k) s.cell_dofs.push_back(2 * mesh.cells[c][k] + comp);
          s.cell_dofs.push_back(2 * nv + 2 * c + comp);
        }
      }
      break;
    }
    case SpaceKind::Edge1: {
      s.local_dofs = 3;
      for (int e = 0; e < mesh.num_edges(); ++e) {
        add_dof({EntityType::Edge, e, 0}, bc.zero_on_outer_boundary && outer_edge[e]);
      }
      for (int c = 0; c < nc; ++c) {
        for (int k = 0; k < 3; ++k) s.cell_dofs.push_back(mesh.cell_edges[c][k]);
      }
      break;
    }
    case SpaceKind::InsulatorMultiplier: {
      if (!mesh.has_subdomain(Subdomain::Insulator)) {
        throw Error(ErrorCode::MissingTag, "multiplier space needs Insulator cells");
      }
      if (!mesh.has_subdomain(Subdomain::Conductor)) {
        throw Error(ErrorCode::MissingTag, "multiplier space needs Conductor cells");
      }
      s.local_dofs = 3;
      s.interface_groups = interface_components(mesh);
      std::vector<int> group_of(nv, -1);
      for (int g = 0; g < static_cast<int>(s.interface_groups.size()); ++g) {
        for (int v : s.interface_groups[g]) {
          if (outer_vertex[v]) {
            throw Error(ErrorCode::InvalidArgument,
                        "conductor touches the outer boundary; internal conductor required");
          }
          group_of[v] = g;
        }
      }
      std::vector<bool> insulator_vertex(nv, false);
      for (int c = 0; c < nc; ++c) {
        s.active_cell[c] = mesh.cell_subdomain[c] == Subdomain::Insulator;
        if (!s.active_cell[c]) continue;
        for (int v : mesh.cells[c]) insulator_vertex[v] = true;
      }
      std::vector<int> vertex_dof(nv, -1);
      std::vector<int> group_dof(s.interface_groups.size(), -1);
      for (int v = 0; v < nv; ++v) {
        if (!insulator_vertex[v]) continue;
        if (group_of[v] >= 0) {
          int& gd = group_dof[group_of[v]];
          if (gd < 0) gd = add_dof({EntityType::InterfaceGroup, group_of[v], 0}, false);
          vertex_dof[v] = gd;
        } else {
          vertex_dof[v] = add_dof({EntityType::Vertex, v, 0},
                                  bc.zero_on_outer_boundary && outer_vertex[v]);
        }
      }
      for (int c = 0; c < nc; ++c) {
        for (int k = 0; k < 3; ++k) {
          s.cell_dofs.push_back(s.active_cell[c] ? vertex_dof[mesh.cells[c][k]] : -1);
        }
      }
      break;
    }
  }

  s.num_dofs = static_cast<int>(s.dof_entity.size());
  s.free_index.assign(s.num_dofs, -1);
  for (int d = 0; d < s.num_dofs; ++d) {
    if (constrained[d]) {
      s.constrained_dofs.push_back(d);
    } else {
      s.free_index[d] = static_cast<int>(s.free_dofs.size());
      s.free_dofs.push_back(d);
    }
  }
  s.prescribed = Eigen::VectorXd::Zero(s.num_dofs);
  return s;
}

Eigen::VectorXd interpolate(const FeSpace& space, const ScalarField& f) {
  if (space.is_vector()) throw Error(ErrorCode::SpaceMismatch, "scalar field on a vector space");
  const TriMesh& mesh = *space.mesh;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_dofs);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(space.num_dofs);
  for (int d = 0; d < space.num_dofs; ++d) {
    const auto& ent = space.dof_entity[d];
    if (ent.type == EntityType::Vertex) {
      out(d) = f(mesh.vertices[ent.index]);
      count(d) = 1.0;
    } else if (ent.type == EntityType::InterfaceGroup) {
      for (int v : space.interface_groups[ent.index]) out(d) += f(mesh.vertices[v]);
      count(d) = static_cast<double>(space.interface_groups[ent.index].size());
    }
  }
  return out.cwiseQuotient(count);
}

Eigen::VectorXd interpolate(const FeSpace& space, const VectorField& f) {
  const TriMesh& mesh = *space.mesh;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_dofs);
  if (space.kind == SpaceKind::P1VectorBubble) {
    const int nv = mesh.num_vertices();
    for (int v = 0; v < nv; ++v) {
      const Eigen::Vector2d val = f(mesh.vertices[v]);
      out(2 * v) = val.x();
      out(2 * v + 1) = val.y();
    }
    // Bubble coefficient matches the value at the barycenter, where the
    // bubble equals one and each P1 hat equals 1/3.
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const Eigen::Vector2d mid = f(mesh.centroid(c));
      for (int comp = 0; comp < 2; ++comp) {
        double p1 = 0.0;
        for (int v : mesh.cells[c]) p1 += out(2 * v + comp) / 3.0;
        out(2 * nv + 2 * c + comp) = mid(comp) - p1;
      }
    }
  } else if (space.kind == SpaceKind::Edge1) {
    const auto line = gauss_line4<double>();
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const Eigen::Vector2d& a = mesh.vertices[mesh.edges[e][0]];
      const Eigen::Vector2d& b = mesh.vertices[mesh.edges[e][1]];
      const Eigen::Vector2d t = b - a;  // unit tangent times length
      double moment = 0.0;
      for (const auto& [s, w] : line) moment += w * f(a + s * t).dot(t);
      out(e) = moment;
    }
  } else {
    throw Error(ErrorCode::SpaceMismatch, "vector field on a scalar space");
  }
  return out;
}

CellTabulation tabulate(const FeSpace& space, int cell, const QuadratureRule<double>& rule) {
  const TriMesh& mesh = *space.mesh;
  CellTabulation t;
  t.geometry = geometry_of(mesh, cell);
  const auto& g = t.geometry;
  t.ndof = space.local_dofs;
  t.npts = rule.size();
  t.points.resize(t.npts);
  t.weights.resize(t.npts);
  for (int q = 0; q < t.npts; ++q) {
    t.points[q] = g.map(rule.points[q]);
    t.weights[q] = rule.weights[q] * 2.0 * g.area;
  }
  const int n = t.ndof * t.npts;
  switch (space.kind) {
    case SpaceKind::P1:
    case SpaceKind::InsulatorMultiplier: {
      t.value.resize(3, t.npts);
      t.grad.resize(n);
      for (int i = 0; i < 3; ++i) {
        for (int q = 0; q < t.npts; ++q) {
          t.value(i, q) = rule.points[q](i);
          t.grad[t.at(i, q)] = g.grad[i];
        }
      }
      break;
    }
    case SpaceKind::P1VectorBubble: {
      t.vec.resize(n);
      t.jac.resize(n);
      t.rot.resize(8, t.npts);
      t.div.resize(8, t.npts);
      for (int q = 0; q < t.npts; ++q) {
        const auto& l = rule.points[q];
        for (int s = 0; s < 4; ++s) {
          const double phi = s < 3 ? l(s) : bubble(l);
          const Eigen::Vector2d dphi = s < 3 ? g.grad[s] : bubble_gradient(g, l);
          for (int comp = 0; comp < 2; ++comp) {
            const int i = 4 * comp + s;
            Eigen::Vector2d v = Eigen::Vector2d::Zero();
            v(comp) = phi;
            Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
            j.row(comp) = dphi.transpose();
            t.vec[t.at(i, q)] = v;
            t.jac[t.at(i, q)] = j;
            t.div(i, q) = j.trace();
            t.rot(i, q) = j(1, 0) - j(0, 1);
          }
        }
      }
      break;
    }
    case SpaceKind::Edge1: {
      t.vec.resize(n);
      t.rot.resize(3, t.npts);
      t.div.setZero(3, t.npts);
      const auto& cv = mesh.cells[cell];
      for (int k = 0; k < 3; ++k) {
        auto [a, b] = oriented_local_edge(cv, k);
        const double r = whitney_rot(g, a, b);
        for (int q = 0; q < t.npts; ++q) {
          t.vec[t.at(k, q)] = whitney(g, a, b, rule.points[q]);
          t.rot(k, q) = r;
        }
      }
      break;
    }
  }
  return t;
}

}  // namespace degmix
