#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "degmix/error.hpp"

namespace degmix {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Symmetric rule on the reference triangle. Points are barycentric
/// coordinates, weights sum to the reference area 1/2.
template <typename Scalar>
struct QuadratureRule {
  int degree = 0;
  std::vector<Eigen::Matrix<Scalar, 3, 1>> points;
  std::vector<Scalar> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

namespace detail {

template <typename Scalar>
void add_orbit(QuadratureRule<Scalar>& rule, Scalar w, Scalar a, Scalar b, Scalar c) {
  using P = Eigen::Matrix<Scalar, 3, 1>;
  const Scalar half(0.5);
  if (a == b && b == c) {
    rule.points.push_back(P(a, b, c));
    rule.weights.push_back(half * w);
  } else if (b == c) {
    for (const P& p : {P(a, b, b), P(b, a, b), P(b, b, a)}) {
      rule.points.push_back(p);
      rule.weights.push_back(half * w);
    }
  } else {
    for (const P& p : {P(a, b, c), P(a, c, b), P(b, a, c), P(b, c, a), P(c, a, b), P(c, b, a)}) {
      rule.points.push_back(p);
      rule.weights.push_back(half * w);
    }
  }
}

}  // namespace detail

/// 6-point degree-4 rule.
template <typename Scalar = double>
QuadratureRule<Scalar> quadrature_degree4() {
  QuadratureRule<Scalar> rule;
  rule.degree = 4;
  detail::add_orbit<Scalar>(rule, Scalar(0.223381589678011465944), Scalar(0.108103018168070227360),
                            Scalar(0.445948490915964886320), Scalar(0.445948490915964886320));
  detail::add_orbit<Scalar>(rule, Scalar(0.109951743655321867389), Scalar(0.816847572980458513080),
                            Scalar(0.091576213509770743460), Scalar(0.091576213509770743460));
  return rule;
}

/// 12-point degree-6 rule. Integrates bubble-times-bubble products exactly.
template <typename Scalar = double>
QuadratureRule<Scalar> quadrature_degree6() {
  QuadratureRule<Scalar> rule;
  rule.degree = 6;
  detail::add_orbit<Scalar>(rule, Scalar(0.116786275726379366030), 1 - 2 * Scalar(0.249286745170910421291639),
                            Scalar(0.249286745170910421291639), Scalar(0.249286745170910421291639));
  detail::add_orbit<Scalar>(rule, Scalar(0.050844906370206816921), 1 - 2 * Scalar(0.063089014491502228340331),
                            Scalar(0.063089014491502228340331), Scalar(0.063089014491502228340331));
  detail::add_orbit<Scalar>(rule, Scalar(0.082851075618373575194), Scalar(0.053145049844816947353249),
                            Scalar(0.310352451033784405416607),
                            1 - Scalar(0.053145049844816947353249) - Scalar(0.310352451033784405416607));
  return rule;
}

/// Gauss-Legendre points on [0,1] with weights summing to 1.
template <typename Scalar = double>
std::vector<std::array<Scalar, 2>> gauss_line4() {
  const Scalar a = Scalar(0.339981043584856264803), b = Scalar(0.861136311594052575224);
  const Scalar wa = Scalar(0.652145154862546142627), wb = Scalar(0.347854845137453857373);
  const Scalar h(0.5);
  return {{h * (1 - b), h * wb}, {h * (1 - a), h * wa}, {h * (1 + a), h * wa}, {h * (1 + b), h * wb}};
}

/// Affine geometry of one triangle.
template <typename Scalar>
struct CellGeometry {
  std::array<Vec2<Scalar>, 3> vertices;
  Scalar area;
  // grad[i] is the constant gradient of barycentric coordinate i.
  std::array<Vec2<Scalar>, 3> grad;

  Vec2<Scalar> map(const Eigen::Matrix<Scalar, 3, 1>& bary) const {
    return bary(0) * vertices[0] + bary(1) * vertices[1] + bary(2) * vertices[2];
  }
};

/// Throws DegenerateCell if the signed area is not positive.
template <typename Scalar>
CellGeometry<Scalar> cell_geometry(const Vec2<Scalar>& a, const Vec2<Scalar>& b,
                                   const Vec2<Scalar>& c) {
  CellGeometry<Scalar> g{{a, b, c}, Scalar(0), {}};
  const Scalar det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  g.area = det / 2;
  if (!(g.area > Scalar(0))) throw Error(ErrorCode::DegenerateCell, "cell area must be positive");
  // grad(lambda_i) = rot90(opposite edge) / (2 area), pointing into the cell.
  for (int i = 0; i < 3; ++i) {
    const Vec2<Scalar>& p = g.vertices[(i + 1) % 3];
    const Vec2<Scalar>& q = g.vertices[(i + 2) % 3];
    g.grad[i] = Vec2<Scalar>(p.y() - q.y(), q.x() - p.x()) / det;
  }
  return g;
}

template <typename Scalar = double>
CellGeometry<Scalar> reference_geometry() {
  return cell_geometry<Scalar>(Vec2<Scalar>(0, 0), Vec2<Scalar>(1, 0), Vec2<Scalar>(0, 1));
}

/// Exact P1 mass matrix on the reference triangle.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 3, 3> p1_mass_reference() {
  Eigen::Matrix<Scalar, 3, 3> m;
  m.setConstant(Scalar(1));
  m.diagonal().setConstant(Scalar(2));
  return m / Scalar(24);
}

/// P1 mass matrix on a cell: |K|/12 * (1 + delta_ij).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> p1_mass(const CellGeometry<Scalar>& g) {
  return p1_mass_reference<Scalar>() * (2 * g.area);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> p1_stiffness(const CellGeometry<Scalar>& g) {
  Eigen::Matrix<Scalar, 3, 3> k;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k(i, j) = g.area * g.grad[i].dot(g.grad[j]);
  }
  return k;
}

/// Cell bubble 27 l0 l1 l2, equal to one at the barycenter.
template <typename Scalar>
Scalar bubble(const Eigen::Matrix<Scalar, 3, 1>& l) {
  return Scalar(27) * l(0) * l(1) * l(2);
}

template <typename Scalar>
Vec2<Scalar> bubble_gradient(const CellGeometry<Scalar>& g, const Eigen::Matrix<Scalar, 3, 1>& l) {
  return Scalar(27) * (l(1) * l(2) * g.grad[0] + l(0) * l(2) * g.grad[1] + l(0) * l(1) * g.grad[2]);
}

/// Whitney function l_a grad(l_b) - l_b grad(l_a) for the local edge a -> b.
template <typename Scalar>
Vec2<Scalar> whitney(const CellGeometry<Scalar>& g, int a, int b,
                     const Eigen::Matrix<Scalar, 3, 1>& l) {
  return l(a) * g.grad[b] - l(b) * g.grad[a];
}

/// Constant scalar rot of the Whitney function for a -> b.
template <typename Scalar>
Scalar whitney_rot(const CellGeometry<Scalar>& g, int a, int b) {
  return 2 * (g.grad[a].x() * g.grad[b].y() - g.grad[a].y() * g.grad[b].x());
}

/// Local endpoints (a, b) of the cell edge opposite local vertex k, with a
/// before b in global vertex order.
inline std::array<int, 2> oriented_local_edge(const std::array<int, 3>& cell_vertices, int k) {
  int a = (k + 1) % 3, b = (k + 2) % 3;
  if (cell_vertices[a] > cell_vertices[b]) std::swap(a, b);
  return {a, b};
}

/// Per-edge rot values for the three globally oriented edges of a cell.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> edge1_curl(const CellGeometry<Scalar>& g,
                                       const std::array<int, 3>& cell_vertices) {
  Eigen::Matrix<Scalar, 3, 1> r;
  for (int k = 0; k < 3; ++k) {
    auto [a, b] = oriented_local_edge(cell_vertices, k);
    r(k) = whitney_rot(g, a, b);
  }
  return r;
}

}  // namespace degmix
