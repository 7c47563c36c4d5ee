#include "degmix/assembly.hpp"

#include <ostream>

namespace degmix {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Adds a local block, skipping constrained and inactive DOFs.
void scatter(Triplets& out, const FeSpace& rows, const FeSpace& cols, int cell,
             const Eigen::MatrixXd& local) {
  const int* rd = rows.dofs_of(cell);
  const int* cd = cols.dofs_of(cell);
  for (int i = 0; i < local.rows(); ++i) {
    if (rd[i] < 0) continue;
    const int fi = rows.free_index[rd[i]];
    if (fi < 0) continue;
    for (int j = 0; j < local.cols(); ++j) {
      if (cd[j] < 0) continue;
      const int fj = cols.free_index[cd[j]];
      if (fj < 0 || local(i, j) == 0.0) continue;
      out.emplace_back(fi, fj, local(i, j));
    }
  }
}

SparseMatrix to_sparse(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void require_same_mesh(const FeSpace& a, const FeSpace& b) {
  if (a.mesh != b.mesh) throw Error(ErrorCode::SpaceMismatch, "spaces live on different meshes");
}

}  // namespace

OperatorSet assemble_stokes(std::shared_ptr<const FeSpace> velocity,
                            std::shared_ptr<const FeSpace> pressure, double nu) {
  if (!velocity || !pressure || velocity->kind != SpaceKind::P1VectorBubble ||
      pressure->kind != SpaceKind::P1) {
    throw Error(ErrorCode::SpaceMismatch, "Stokes needs P1VectorBubble velocity and P1 pressure");
  }
  require_same_mesh(*velocity, *pressure);
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "viscosity must be positive");
  const TriMesh& mesh = *velocity->mesh;
  const auto& rule = default_quadrature();
  Triplets mass, stiff, div, pmass;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(pressure->num_free());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellTabulation tv = tabulate(*velocity, c, rule);
    const CellTabulation tp = tabulate(*pressure, c, rule);
    Eigen::MatrixXd lm = Eigen::MatrixXd::Zero(8, 8), lk = Eigen::MatrixXd::Zero(8, 8);
    Eigen::MatrixXd lb = Eigen::MatrixXd::Zero(3, 8), lp = Eigen::MatrixXd::Zero(3, 3);
    for (int q = 0; q < tv.npts; ++q) {
      const double w = tv.weights[q];
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          lm(i, j) += w * tv.vec[tv.at(i, q)].dot(tv.vec[tv.at(j, q)]);
          lk(i, j) += w * tv.jac[tv.at(i, q)].cwiseProduct(tv.jac[tv.at(j, q)]).sum();
        }
        for (int p = 0; p < 3; ++p) lb(p, i) -= w * tp.value(p, q) * tv.div(i, q);
      }
      for (int p = 0; p < 3; ++p) {
        for (int r = 0; r < 3; ++r) lp(p, r) += w * tp.value(p, q) * tp.value(r, q);
      }
    }
    scatter(mass, *velocity, *velocity, c, lm);
    scatter(stiff, *velocity, *velocity, c, lk);
    scatter(div, *pressure, *velocity, c, lb);
    scatter(pmass, *pressure, *pressure, c, lp);
    const int* pd = pressure->dofs_of(c);
    for (int p = 0; p < 3; ++p) {
      const int fp = pressure->free_index[pd[p]];
      if (fp >= 0) mean(fp) += lp.row(p).sum();
    }
  }
  const int nu_dofs = velocity->num_free(), np = pressure->num_free();
  OperatorSet ops;
  ops.instance = Instance::Stokes;
  ops.coefficients.nu = nu;
  ops.R = to_sparse(nu_dofs, nu_dofs, mass);
  ops.X = to_sparse(nu_dofs, nu_dofs, stiff);
  ops.A = nu * ops.X;
  ops.B = to_sparse(np, nu_dofs, div);
  ops.M = to_sparse(np, np, pmass);
  ops.mean_row = mean;
  ops.primal = std::move(velocity);
  ops.multiplier = std::move(pressure);
  return ops;
}

OperatorSet assemble_eddy2d(std::shared_ptr<const FeSpace> field,
                            std::shared_ptr<const FeSpace> multiplier, const Coefficients& k) {
  if (!field || !multiplier || field->kind != SpaceKind::Edge1 ||
      multiplier->kind != SpaceKind::InsulatorMultiplier) {
    throw Error(ErrorCode::SpaceMismatch, "eddy model needs Edge1 and InsulatorMultiplier spaces");
  }
  require_same_mesh(*field, *multiplier);
  const TriMesh& mesh = *field->mesh;
  if (!(k.sigma > 0.0) || !mesh.has_subdomain(Subdomain::Conductor)) {
    throw Error(ErrorCode::NoConductorCells, "conductivity support is empty");
  }
  if (!(k.mu_mag > 0.0) || !(k.epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "permeability and permittivity must be positive");
  }
  const auto& rule = default_quadrature();
  Triplets mass_c, rotrot, hcurl, coupling, h1;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellTabulation te = tabulate(*field, c, rule);
    Eigen::Matrix3d lm = Eigen::Matrix3d::Zero(), lr = Eigen::Matrix3d::Zero();
    for (int q = 0; q < te.npts; ++q) {
      const double w = te.weights[q];
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          lm(i, j) += w * te.vec[te.at(i, q)].dot(te.vec[te.at(j, q)]);
          lr(i, j) += w * te.rot(i, q) * te.rot(j, q);
        }
      }
    }
    const Subdomain sub = mesh.cell_subdomain[c];
    if (sub == Subdomain::Conductor) scatter(mass_c, *field, *field, c, k.sigma * lm);
    scatter(rotrot, *field, *field, c, lr / k.mu_mag);
    scatter(hcurl, *field, *field, c, lm + lr);
    if (sub != Subdomain::Insulator) continue;
    const CellTabulation tm = tabulate(*multiplier, c, rule);
    Eigen::Matrix3d lb = Eigen::Matrix3d::Zero(), lh = Eigen::Matrix3d::Zero();
    for (int q = 0; q < te.npts; ++q) {
      const double w = te.weights[q];
      for (int p = 0; p < 3; ++p) {
        for (int j = 0; j < 3; ++j) {
          lb(p, j) += w * k.epsilon * te.vec[te.at(j, q)].dot(tm.grad[tm.at(p, q)]);
          lh(p, j) += w * (tm.value(p, q) * tm.value(j, q) +
                           tm.grad[tm.at(p, q)].dot(tm.grad[tm.at(j, q)]));
        }
      }
    }
    scatter(coupling, *multiplier, *field, c, lb);
    scatter(h1, *multiplier, *multiplier, c, lh);
  }
  const int n = field->num_free(), m = multiplier->num_free();
  OperatorSet ops;
  ops.instance = Instance::Eddy2d;
  ops.coefficients = k;
  ops.R = to_sparse(n, n, mass_c);
  ops.A = to_sparse(n, n, rotrot);
  ops.X = to_sparse(n, n, hcurl);
  ops.B = to_sparse(m, n, coupling);
  ops.M = to_sparse(m, m, h1);
  ops.primal = std::move(field);
  ops.multiplier = std::move(multiplier);
  return ops;
}

Eigen::VectorXd assemble_load(const FeSpace& space, const Source& f, double t) {
  const TriMesh& mesh = *space.mesh;
  const auto& rule = default_quadrature();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.num_free());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!space.active_cell[c]) continue;
    const CellTabulation tab = tabulate(space, c, rule);
    const Subdomain sub = mesh.cell_subdomain[c];
    Eigen::VectorXd local = Eigen::VectorXd::Zero(tab.ndof);
    for (int q = 0; q < tab.npts; ++q) {
      const double w = tab.weights[q];
      const Eigen::Vector2d& x = tab.points[q];
      if (space.is_vector()) {
        if (f.vector) {
          const Eigen::Vector2d fv = f.vector(x, t, sub);
          for (int i = 0; i < tab.ndof; ++i) local(i) += w * fv.dot(tab.vec[tab.at(i, q)]);
        }
        if (f.rot) {
          const double fr = f.rot(x, t, sub);
          for (int i = 0; i < tab.ndof; ++i) local(i) += w * fr * tab.rot(i, q);
        }
      } else if (f.scalar) {
        const double fs = f.scalar(x, t, sub);
        for (int i = 0; i < tab.ndof; ++i) local(i) += w * fs * tab.value(i, q);
      }
    }
    const int* dofs = space.dofs_of(c);
    for (int i = 0; i < tab.ndof; ++i) {
      if (dofs[i] < 0) continue;
      const int fi = space.free_index[dofs[i]];
      if (fi >= 0) load(fi) += local(i);
    }
  }
  return load;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  const auto old = out.precision(17);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
  out.precision(old);
}

}  // namespace degmix
