#pragma once

// Degrees of freedom of V_h = {v0, vn n_e}: C0 Lagrange P_{k+2} cell values
// plus one P_{k+1} polynomial per edge for the normal derivative.
//
// Global numbering: vertex nodes, then edge-interior nodes (ordered from the
// lower to the higher vertex id), then cell-interior nodes, then the edge
// unknowns (k+2 Legendre coefficients per edge, edge by edge).
//
// Local numbering on a triangle: the (k+3)(k+4)/2 Lagrange nodes (vertices,
// side nodes of sides 0,1,2 traversed counter-clockwise, interior nodes),
// followed by the k+2 coefficients of each of the three sides.

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "c0wg/errors.hpp"
#include "c0wg/mesh.hpp"
#include "c0wg/polybasis.hpp"

namespace c0wg {

enum class EdgeUnknowns { include, exclude };

struct DofMap {
  int k = 0;
  int degree = 2;  // k + 2
  bool has_edge_dofs = true;

  int n_vertices = 0;
  int n_edges = 0;
  int n_triangles = 0;

  int nodes_per_side = 1;     // degree - 1
  int interior_per_cell = 0;  // (degree-1)(degree-2)/2
  int cell_local = 6;         // (degree+1)(degree+2)/2
  int edge_local = 2;         // k + 2 per side

  int n_cell = 0;
  int n_total = 0;

  std::vector<int> element_dofs;
  std::vector<char> boundary_cell_mask;
  std::vector<char> boundary_edge_mask;

  int local_size() const { return cell_local + (has_edge_dofs ? 3 * edge_local : 0); }

  std::span<const int> dofs(int tri) const {
    return {element_dofs.data() + static_cast<std::size_t>(tri) * local_size(),
            static_cast<std::size_t>(local_size())};
  }

  int edge_dof(int edge, int l) const { return n_cell + edge * edge_local + l; }
};

/// Coefficient vector of a discrete function, indexed by a DofMap.
struct FieldVector {
  Eigen::VectorXd values;

  FieldVector() = default;
  explicit FieldVector(const DofMap& dm) : values(Eigen::VectorXd::Zero(dm.n_total)) {}
  FieldVector(const DofMap& dm, Eigen::VectorXd v) : values(std::move(v)) {
    if (values.size() != dm.n_total) {
      throw Error(ErrorKind::dimension, "field vector length does not match the DOF map");
    }
  }

  Eigen::VectorXd local(const DofMap& dm, int tri) const {
    const auto ids = dm.dofs(tri);
    Eigen::VectorXd out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) out(i) = values(ids[i]);
    return out;
  }
};

/// Barycentric lattice points of degree p in local order (vertices, side
/// nodes counter-clockwise, interior nodes).
template <class Real>
std::vector<Point2T<Real>> lagrange_nodes(const std::array<Point2T<Real>, 3>& v, int p) {
  if (p < 1) throw Error(ErrorKind::capability, "Lagrange degree must be >= 1");
  std::vector<Point2T<Real>> nodes(v.begin(), v.end());
  for (int side = 0; side < 3; ++side) {
    const Point2T<Real>& a = v[(side + 1) % 3];
    const Point2T<Real>& b = v[(side + 2) % 3];
    for (int j = 1; j < p; ++j) nodes.push_back(a + (Real(j) / Real(p)) * (b - a));
  }
  for (int i = 1; i < p; ++i) {
    for (int j = 1; i + j < p; ++j) {
      const int l = p - i - j;
      nodes.push_back((Real(i) * v[0] + Real(j) * v[1] + Real(l) * v[2]) / Real(p));
    }
  }
  return nodes;
}

inline std::vector<Point2> lagrange_nodes(const Mesh& mesh, int tri, int p) {
  return lagrange_nodes(mesh.corners(tri), p);
}

/// Nodal basis of P_p(K): column i of the value table is N_i.
template <class Real>
BasicLocalPolynomials<Real> lagrange_basis(const std::array<Point2T<Real>, 3>& v, int p) {
  BasicLocalPolynomials<Real> poly;
  poly.frame = BasicLocalFrame<Real>::for_triangle(v);
  poly.degree = p;
  const auto nodes = lagrange_nodes(v, p);
  const MatrixT<Real> vand = eval_monomials(poly.frame, p, std::span<const Point2T<Real>>(nodes), 0).value;
  // vand * coeffs^T = I
  poly.coeffs =
      vand.partialPivLu().solve(MatrixT<Real>::Identity(vand.rows(), vand.cols())).transpose();
  return poly;
}

inline DofMap build_dof_map(const Mesh& mesh, int k, EdgeUnknowns edges = EdgeUnknowns::include) {
  if (k < 0 || k > 1) {
    throw Error(ErrorKind::capability, "only k = 0 and k = 1 are supported");
  }
  DofMap dm;
  dm.k = k;
  dm.degree = k + 2;
  dm.has_edge_dofs = edges == EdgeUnknowns::include;
  dm.n_vertices = static_cast<int>(mesh.num_vertices());
  dm.n_edges = static_cast<int>(mesh.num_edges());
  dm.n_triangles = static_cast<int>(mesh.num_triangles());
  const int p = dm.degree;
  dm.nodes_per_side = p - 1;
  dm.interior_per_cell = (p - 1) * (p - 2) / 2;
  dm.cell_local = dim_p2(p);
  dm.edge_local = k + 2;
  dm.n_cell = dm.n_vertices + dm.n_edges * dm.nodes_per_side + dm.n_triangles * dm.interior_per_cell;
  dm.n_total = dm.n_cell + (dm.has_edge_dofs ? dm.n_edges * dm.edge_local : 0);

  const int nloc = dm.local_size();
  dm.element_dofs.resize(static_cast<std::size_t>(dm.n_triangles) * nloc);
  const int side_base = dm.n_vertices;
  const int interior_base = dm.n_vertices + dm.n_edges * dm.nodes_per_side;
  for (int t = 0; t < dm.n_triangles; ++t) {
    const auto& tri = mesh.triangles[t];
    int* out = dm.element_dofs.data() + static_cast<std::size_t>(t) * nloc;
    int pos = 0;
    for (int i = 0; i < 3; ++i) out[pos++] = tri.vertex_ids[i];
    for (int side = 0; side < 3; ++side) {
      const int e = tri.edge_ids[side];
      const bool forward = tri.vertex_ids[(side + 1) % 3] < tri.vertex_ids[(side + 2) % 3];
      for (int j = 1; j < p; ++j) {
        const int along = forward ? j - 1 : p - 1 - j;
        out[pos++] = side_base + e * dm.nodes_per_side + along;
      }
    }
    for (int i = 0; i < dm.interior_per_cell; ++i) out[pos++] = interior_base + t * dm.interior_per_cell + i;
    if (dm.has_edge_dofs) {
      for (int side = 0; side < 3; ++side) {
        for (int l = 0; l < dm.edge_local; ++l) out[pos++] = dm.edge_dof(tri.edge_ids[side], l);
      }
    }
  }

  dm.boundary_cell_mask.assign(dm.n_total, 0);
  dm.boundary_edge_mask.assign(dm.n_total, 0);
  for (int e = 0; e < dm.n_edges; ++e) {
    const auto& edge = mesh.edges[e];
    if (!edge.is_boundary) continue;
    dm.boundary_cell_mask[edge.vertex_ids[0]] = 1;
    dm.boundary_cell_mask[edge.vertex_ids[1]] = 1;
    for (int j = 0; j < dm.nodes_per_side; ++j) dm.boundary_cell_mask[side_base + e * dm.nodes_per_side + j] = 1;
    if (dm.has_edge_dofs) {
      for (int l = 0; l < dm.edge_local; ++l) dm.boundary_edge_mask[dm.edge_dof(e, l)] = 1;
    }
  }
  return dm;
}

/// Global indices fixed by the boundary conditions, ascending: cell nodes on
/// the boundary and all unknowns of boundary edges.
inline std::vector<int> restrict_to_v0(const DofMap& dm) {
  std::vector<int> out;
  for (int i = 0; i < dm.n_total; ++i) {
    if (dm.boundary_cell_mask[i] || dm.boundary_edge_mask[i]) out.push_back(i);
  }
  return out;
}

}  // namespace c0wg
