#include "degmix/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace degmix {

double TriMesh::signed_area(int cell) const {
  const auto& c = cells[cell];
  const Eigen::Vector2d a = vertices[c[1]] - vertices[c[0]];
  const Eigen::Vector2d b = vertices[c[2]] - vertices[c[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double TriMesh::diameter(int cell) const {
  const auto& c = cells[cell];
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    d = std::max(d, (vertices[c[k]] - vertices[c[(k + 1) % 3]]).norm());
  }
  return d;
}

Eigen::Vector2d TriMesh::centroid(int cell) const {
  const auto& c = cells[cell];
  return (vertices[c[0]] + vertices[c[1]] + vertices[c[2]]) / 3.0;
}

std::vector<bool> TriMesh::outer_boundary_edges() const {
  std::vector<bool> flag(edges.size(), false);
  for (const auto& be : boundary_edges) {
    if (be.tag == BoundaryTag::OuterBoundary) flag[be.edge] = true;
  }
  return flag;
}

std::vector<bool> TriMesh::outer_boundary_vertices() const {
  std::vector<bool> flag(vertices.size(), false);
  for (const auto& be : boundary_edges) {
    if (be.tag != BoundaryTag::OuterBoundary) continue;
    flag[edges[be.edge][0]] = true;
    flag[edges[be.edge][1]] = true;
  }
  return flag;
}

bool TriMesh::has_subdomain(Subdomain s) const {
  return std::find(cell_subdomain.begin(), cell_subdomain.end(), s) != cell_subdomain.end();
}

namespace {

// Fills edges, cell_edges, edge_cells, boundary_edges and h from vertices,
// cells and cell_subdomain. Edges are numbered in lexicographic order of
// their (low, high) vertex pair.
void build_topology(TriMesh& mesh) {
  std::map<std::array<int, 2>, int> index;
  for (const auto& c : mesh.cells) {
    for (int k = 0; k < 3; ++k) {
      int a = c[(k + 1) % 3], b = c[(k + 2) % 3];
      index.emplace(std::array<int, 2>{std::min(a, b), std::max(a, b)}, 0);
    }
  }
  mesh.edges.clear();
  mesh.edges.reserve(index.size());
  for (auto& [key, id] : index) {
    id = static_cast<int>(mesh.edges.size());
    mesh.edges.push_back(key);
  }
  mesh.cell_edges.assign(mesh.cells.size(), {0, 0, 0});
  mesh.edge_cells.assign(mesh.edges.size(), {-1, -1});
  for (int ci = 0; ci < mesh.num_cells(); ++ci) {
    const auto& c = mesh.cells[ci];
    for (int k = 0; k < 3; ++k) {
      int a = c[(k + 1) % 3], b = c[(k + 2) % 3];
      int e = index.at({std::min(a, b), std::max(a, b)});
      mesh.cell_edges[ci][k] = e;
      auto& ec = mesh.edge_cells[e];
      if (ec[0] < 0) {
        ec[0] = ci;
      } else if (ec[1] < 0) {
        ec[1] = ci;
      } else {
        throw Error(ErrorCode::InvalidArgument, "edge shared by more than two cells");
      }
    }
  }
  mesh.boundary_edges.clear();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ec = mesh.edge_cells[e];
    if (ec[1] < 0) {
      mesh.boundary_edges.push_back({e, BoundaryTag::OuterBoundary});
    } else if (mesh.cell_subdomain[ec[0]] != mesh.cell_subdomain[ec[1]]) {
      mesh.boundary_edges.push_back({e, BoundaryTag::Interface});
    }
  }
  mesh.h = 0.0;
  for (int ci = 0; ci < mesh.num_cells(); ++ci) mesh.h = std::max(mesh.h, mesh.diameter(ci));
}

bool on_lattice(double value, double origin, double spacing) {
  const double steps = (value - origin) / spacing;
  return std::abs(steps - std::round(steps)) <= 1e-10;
}

}  // namespace

TriMesh structured_mesh(const Rectangle& domain, int n, const std::optional<Rectangle>& conductor,
                        Diagonal pattern) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "structured_mesh needs n >= 1");
  if (domain.x1 <= domain.x0 || domain.y1 <= domain.y0) {
    throw Error(ErrorCode::InvalidArgument, "empty domain rectangle");
  }
  const double hx = (domain.x1 - domain.x0) / n;
  const double hy = (domain.y1 - domain.y0) / n;
  if (conductor) {
    const auto& c = *conductor;
    const bool inside = c.x0 >= domain.x0 && c.x1 <= domain.x1 && c.y0 >= domain.y0 &&
                        c.y1 <= domain.y1 && c.x1 > c.x0 && c.y1 > c.y0;
    if (!inside || !on_lattice(c.x0, domain.x0, hx) || !on_lattice(c.x1, domain.x0, hx) ||
        !on_lattice(c.y0, domain.y0, hy) || !on_lattice(c.y1, domain.y0, hy)) {
      throw Error(ErrorCode::ConductorNotOnLattice,
                  "conductor corners must be grid points inside the domain");
    }
  }

  TriMesh mesh;
  mesh.domain = domain;
  mesh.conductor = conductor;
  const int nv = n + 1;
  auto vid = [nv](int i, int j) { return j * nv + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.emplace_back(domain.x0 + i * hx, domain.y0 + j * hy);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if (pattern == Diagonal::Right) {
        mesh.cells.push_back({v00, v10, v11});
        mesh.cells.push_back({v00, v11, v01});
      } else {
        const int mid = static_cast<int>(mesh.vertices.size());
        mesh.vertices.emplace_back(domain.x0 + (i + 0.5) * hx, domain.y0 + (j + 0.5) * hy);
        mesh.cells.push_back({v00, v10, mid});
        mesh.cells.push_back({v10, v11, mid});
        mesh.cells.push_back({v11, v01, mid});
        mesh.cells.push_back({v01, v00, mid});
      }
    }
  }
  mesh.cell_subdomain.resize(mesh.cells.size(), Subdomain::Whole);
  if (conductor) {
    for (int ci = 0; ci < mesh.num_cells(); ++ci) {
      mesh.cell_subdomain[ci] =
          conductor->contains(mesh.centroid(ci)) ? Subdomain::Conductor : Subdomain::Insulator;
    }
  }
  build_topology(mesh);
  return mesh;
}

TriMesh uniform_refine(const TriMesh& mesh) {
  check_invariants(mesh);
  TriMesh fine;
  fine.domain = mesh.domain;
  fine.conductor = mesh.conductor;
  fine.vertices = mesh.vertices;
  const int nv = mesh.num_vertices();
  for (const auto& e : mesh.edges) {
    fine.vertices.push_back(0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]));
  }
  fine.cells.reserve(4 * mesh.cells.size());
  fine.cell_subdomain.reserve(4 * mesh.cells.size());
  for (int ci = 0; ci < mesh.num_cells(); ++ci) {
    const auto& c = mesh.cells[ci];
    const auto& ce = mesh.cell_edges[ci];
    // m[k] is the midpoint of the edge opposite vertex k.
    const int m0 = nv + ce[0], m1 = nv + ce[1], m2 = nv + ce[2];
    fine.cells.push_back({c[0], m2, m1});
    fine.cells.push_back({m2, c[1], m0});
    fine.cells.push_back({m1, m0, c[2]});
    fine.cells.push_back({m0, m1, m2});
    for (int k = 0; k < 4; ++k) fine.cell_subdomain.push_back(mesh.cell_subdomain[ci]);
  }
  build_topology(fine);
  return fine;
}

void check_invariants(const TriMesh& mesh) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (mesh.cell_subdomain.size() != mesh.cells.size()) fail("cell_subdomain size mismatch");
  if (mesh.cell_edges.size() != mesh.cells.size()) fail("cell_edges size mismatch");
  for (int ci = 0; ci < mesh.num_cells(); ++ci) {
    for (int v : mesh.cells[ci]) {
      if (v < 0 || v >= mesh.num_vertices()) fail("cell references missing vertex");
    }
    if (!(mesh.signed_area(ci) > 0.0)) {
      std::ostringstream os;
      os << "cell " << ci << " has non-positive signed area";
      fail(os.str());
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edges[e][0] >= mesh.edges[e][1]) fail("edge not oriented low-to-high");
    if (mesh.edge_cells[e][0] < 0) fail("edge without cells");
  }
  auto outer = mesh.outer_boundary_edges();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const bool boundary = mesh.edge_cells[e][1] < 0;
    if (boundary != outer[e]) fail("outer boundary tagging inconsistent with connectivity");
    if (boundary) {
      // A boundary edge must lie on the rectangle boundary, otherwise the mesh is not conforming.
      const auto& p = mesh.vertices[mesh.edges[e][0]];
      const auto& q = mesh.vertices[mesh.edges[e][1]];
      const auto& d = mesh.domain;
      const double tol = 1e-12 * std::max(1.0, d.area());
      auto on_side = [&](double a, double b, double s) {
        return std::abs(a - s) <= tol && std::abs(b - s) <= tol;
      };
      if (!(on_side(p.x(), q.x(), d.x0) || on_side(p.x(), q.x(), d.x1) ||
            on_side(p.y(), q.y(), d.y0) || on_side(p.y(), q.y(), d.y1))) {
        fail("non-conforming: boundary edge inside the domain");
      }
    }
  }
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::Interface) continue;
    const auto& ec = mesh.edge_cells[be.edge];
    const auto s0 = mesh.cell_subdomain[ec[0]], s1 = mesh.cell_subdomain[ec[1]];
    const bool separates = (s0 == Subdomain::Conductor && s1 == Subdomain::Insulator) ||
                           (s1 == Subdomain::Conductor && s0 == Subdomain::Insulator);
    if (!separates) fail("interface edge does not separate conductor from insulator");
  }
  if (mesh.conductor) {
    for (int ci = 0; ci < mesh.num_cells(); ++ci) {
      const bool inside = mesh.cell_subdomain[ci] == Subdomain::Conductor;
      for (int v : mesh.cells[ci]) {
        const auto& p = mesh.vertices[v];
        const auto& c = *mesh.conductor;
        const double tol = 1e-12;
        const bool strictly_out = p.x() < c.x0 - tol || p.x() > c.x1 + tol ||
                                  p.y() < c.y0 - tol || p.y() > c.y1 + tol;
        if (inside && strictly_out) fail("conductor cell leaves the conductor");
      }
      if (!inside && mesh.conductor->contains(mesh.centroid(ci))) {
        fail("insulator cell inside the conductor");
      }
    }
  }
}

void write_vtk(std::ostream& out, const TriMesh& mesh) {
  out << "# vtk DataFile Version 3.0\n";
  out << "degmix mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out.precision(17);
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices) out << p.x() << ' ' << p.y() << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int i = 0; i < mesh.num_cells(); ++i) out << "5\n";
  out << "CELL_DATA " << mesh.num_cells() << '\n';
  out << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (auto s : mesh.cell_subdomain) out << static_cast<int>(s) << '\n';
}

}  // namespace degmix
