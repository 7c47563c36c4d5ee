#include "degmix/vtk.hpp"

#include <ostream>

namespace degmix {

void write_snapshot(std::ostream& out, const FeSpace& primal, const Eigen::VectorXd& u,
                    const FeSpace& multiplier, const Eigen::VectorXd& lambda, double time) {
  const TriMesh& mesh = *primal.mesh;
  out.precision(12);
  out << "# vtk DataFile Version 3.0\n";
  out << "degmix snapshot t=" << time << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices) out << p.x() << ' ' << p.y() << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int i = 0; i < mesh.num_cells(); ++i) out << "5\n";

  // Multiplier vertex values; vertices outside its support stay zero.
  Eigen::VectorXd vertex_lambda = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!multiplier.active_cell[c]) continue;
    const int* d = multiplier.dofs_of(c);
    for (int k = 0; k < 3; ++k) vertex_lambda(mesh.cells[c][k]) = lambda(d[k]);
  }

  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  out << "SCALARS multiplier double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) out << vertex_lambda(v) << '\n';
  if (primal.kind == SpaceKind::P1VectorBubble) {
    out << "VECTORS velocity double\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) out << u(2 * v) << ' ' << u(2 * v + 1) << " 0\n";
  }
  out << "CELL_DATA " << mesh.num_cells() << '\n';
  out << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (auto s : mesh.cell_subdomain) out << static_cast<int>(s) << '\n';
  if (primal.kind == SpaceKind::Edge1) {
    const Eigen::Vector3d centroid(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    Eigen::VectorXd rot(mesh.num_cells());
    out << "VECTORS field double\n";
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const auto g = geometry_of(mesh, c);
      const int* d = primal.dofs_of(c);
      Eigen::Vector2d val = Eigen::Vector2d::Zero();
      rot(c) = 0.0;
      for (int k = 0; k < 3; ++k) {
        auto [a, b] = oriented_local_edge(mesh.cells[c], k);
        val += u(d[k]) * whitney(g, a, b, centroid);
        rot(c) += u(d[k]) * whitney_rot(g, a, b);
      }
      out << val.x() << ' ' << val.y() << " 0\n";
    }
    out << "SCALARS rot double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < mesh.num_cells(); ++c) out << rot(c) << '\n';
  }
}

}  // namespace degmix
