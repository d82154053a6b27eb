#pragma once

// Per-element sample data shared by the lift, the assemblers and the norms:
// Lagrange shape functions at volume and side quadrature points, edge basis
// values on each side, and the orientation signs of the sides. Geometry is
// recomputed from the vertex coordinates in the working precision.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "c0wg/mesh.hpp"
#include "c0wg/polybasis.hpp"
#include "c0wg/quadrature.hpp"
#include "c0wg/space.hpp"

namespace c0wg {

/// Quadrature used throughout for a given k: volume rule exact to degree
/// 2(k+3)+2, and k+5 Gauss points per side.
struct QuadratureChoice {
  int volume_degree = 8;
  int edge_points = 5;

  static QuadratureChoice for_k(int k) { return {2 * (k + 3) + 2, k + 5}; }
};

template <class Real>
struct BasicSideSamples {
  int edge = -1;
  Real sigma = 1;
  Point2T<Real> normal = Point2T<Real>::Zero();   // fixed n_e
  Point2T<Real> outward = Point2T<Real>::Zero();  // outward normal of the element
  Real length = 0;
  std::vector<Real> params;  // edge parameter t in [0,1], lower id -> higher id
  std::vector<Point2T<Real>> points;
  std::vector<Real> weights;     // physical, sum to length
  BasicValueTable<Real> cell;    // Lagrange shape functions at `points`
  MatrixT<Real> edge_basis;      // P_{k+1}(e) orthonormal basis at `points`
};

template <class Real>
struct BasicElementKit {
  int tri = -1;
  int k = 0;
  std::array<Point2T<Real>, 3> corners;
  Real area = 0;
  Real diameter = 0;
  BasicLocalPolynomials<Real> lagrange;
  BasicPhysicalRule<Real> volume;
  BasicValueTable<Real> cell;  // Lagrange shape functions at volume points
  std::array<BasicSideSamples<Real>, 3> sides;
};

using SideSamples = BasicSideSamples<double>;
using ElementKit = BasicElementKit<double>;

/// Fixed normal of a mesh edge: clockwise quarter turn of the unit vector
/// from the lower to the higher vertex id.
template <class Real = double>
Point2T<Real> edge_normal(const Mesh& mesh, int e) {
  const auto& ids = mesh.edges[e].vertex_ids;
  const Point2T<Real> d = mesh.vertices[ids[1]].cast<Real>() - mesh.vertices[ids[0]].cast<Real>();
  return Point2T<Real>(d.y(), -d.x()) / d.norm();
}

template <class Real>
BasicSideSamples<Real> sample_side(const Mesh& mesh, int tri, int side, const BasicLocalPolynomials<Real>& lagrange,
                                   int k, const QuadratureRule<1, Real>& line, int deriv_order) {
  BasicSideSamples<Real> s;
  s.edge = mesh.triangles[tri].edge_ids[side];
  s.sigma = Real(mesh.sigma(tri, side));
  s.normal = edge_normal<Real>(mesh, s.edge);
  s.outward = s.sigma * s.normal;
  const BasicEdgeBasis<Real> eb = build_edge_basis<Real>(mesh, s.edge, k + 1);
  s.length = eb.length;
  for (std::size_t q = 0; q < line.size(); ++q) {
    const Real t = line.points[q](0);
    s.params.push_back(t);
    s.points.push_back(eb.point(t));
    s.weights.push_back(line.weights[q] * eb.length);
  }
  s.cell = eval(lagrange, s.points, deriv_order);
  s.edge_basis = eval(eb, s.params, 0);
  return s;
}

template <class Real = double>
BasicElementKit<Real> make_element_kit(const Mesh& mesh, const DofMap& dm, int tri, QuadratureChoice quad,
                                       int deriv_order = 2) {
  using std::abs;
  BasicElementKit<Real> kit;
  kit.tri = tri;
  kit.k = dm.k;
  kit.corners = mesh.corners_as<Real>(tri);
  kit.area = abs(detail::signed_area(kit.corners[0], kit.corners[1], kit.corners[2]));
  for (int i = 0; i < 3; ++i) {
    kit.diameter = std::max(kit.diameter, Real((kit.corners[(i + 1) % 3] - kit.corners[i]).norm()));
  }
  kit.lagrange = lagrange_basis(kit.corners, dm.degree);
  kit.volume = map_rule(triangle_quadrature<Real>(quad.volume_degree), kit.corners);
  kit.cell = eval(kit.lagrange, kit.volume.points, deriv_order);
  const QuadratureRule<1, Real> line = edge_quadrature<Real>(quad.edge_points);
  for (int side = 0; side < 3; ++side) {
    kit.sides[side] = sample_side(mesh, tri, side, kit.lagrange, dm.k, line, deriv_order);
  }
  return kit;
}

template <class Real = double>
BasicElementKit<Real> make_element_kit(const Mesh& mesh, const DofMap& dm, int tri) {
  return make_element_kit<Real>(mesh, dm, tri, QuadratureChoice::for_k(dm.k));
}

}  // namespace c0wg
