#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "degmix/error.hpp"

namespace degmix {

enum class Subdomain { Whole, Conductor, Insulator };
enum class BoundaryTag { OuterBoundary, Interface };
enum class Diagonal { Right, Crossed };

struct Rectangle {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
};

struct TaggedEdge {
  int edge;
  BoundaryTag tag;
};

/// Conforming triangulation of a rectangle.
///
/// Cells are positively oriented vertex triples. Edges are stored with their
/// global orientation (lower vertex index first); local edge k of a cell is
/// the edge opposite local vertex k.
struct TriMesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> cell_edges;
  // Second entry is -1 for edges on the outer boundary.
  std::vector<std::array<int, 2>> edge_cells;
  std::vector<Subdomain> cell_subdomain;
  std::vector<TaggedEdge> boundary_edges;
  Rectangle domain;
  std::optional<Rectangle> conductor;
  double h = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double signed_area(int cell) const;
  double diameter(int cell) const;
  Eigen::Vector2d centroid(int cell) const;

  std::vector<bool> outer_boundary_vertices() const;
  std::vector<bool> outer_boundary_edges() const;
  bool has_subdomain(Subdomain s) const;
};

/// Triangulates `domain` with `n` squares per axis. With a conductor, cells
/// inside it are tagged Conductor and the rest Insulator.
TriMesh structured_mesh(const Rectangle& domain, int n,
                        const std::optional<Rectangle>& conductor = std::nullopt,
                        Diagonal pattern = Diagonal::Right);

/// Red refinement: every triangle is split into four by its edge midpoints.
TriMesh uniform_refine(const TriMesh& mesh);

/// Throws InvalidArgument describing the first violated invariant.
void check_invariants(const TriMesh& mesh);

void write_vtk(std::ostream& out, const TriMesh& mesh);

}  // namespace degmix
