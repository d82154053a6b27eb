#pragma once

// Element-local weak Laplacian. For v = {v0, vn n_e} the lift is the
// polynomial of degree m on K with
//
//   (lift, phi)_K = -(grad v0, grad phi)_K + sum_e sigma_{K,e} <vn, phi>_e
//
// for every phi in P_m(K). Against an orthonormal basis of P_m(K) the
// coefficients of the lift are the right-hand sides themselves, so the lift
// is a dense matrix applied to the local DOF vector.

#include <vector>

#include <Eigen/Dense>

#include "c0wg/element.hpp"
#include "c0wg/errors.hpp"
#include "c0wg/polybasis.hpp"
#include "c0wg/space.hpp"

namespace c0wg {

template <class Real>
struct BasicLocalWeakLap {
  int element = -1;
  int k = 0;
  int lift_degree = 3;
  BasicTriBasis<Real> basis;
  /// dim P_m(K) x local DOF count.
  MatrixT<Real> matrix;

  VectorT<Real> apply(const VectorT<Real>& local_dofs) const { return matrix * local_dofs; }
};

using LocalWeakLap = BasicLocalWeakLap<double>;

template <class Real>
BasicLocalWeakLap<Real> local_weak_laplacian(const BasicElementKit<Real>& kit, int cell_local, int edge_local,
                                             int lift_degree) {
  if (lift_degree < 0) throw Error(ErrorKind::capability, "negative lift degree");
  BasicLocalWeakLap<Real> lift;
  lift.element = kit.tri;
  lift.k = kit.k;
  lift.lift_degree = lift_degree;
  lift.basis.element = kit.tri;
  lift.basis.degree = lift_degree;
  lift.basis.poly = orthonormal_polynomials(kit.corners, lift_degree);

  const int nphi = lift.basis.dim();
  lift.matrix = MatrixT<Real>::Zero(nphi, cell_local + 3 * edge_local);

  const BasicValueTable<Real> phi = eval(lift.basis, kit.volume.points, 1);
  const VectorT<Real> w = Eigen::Map<const VectorT<Real>>(kit.volume.weights.data(), kit.volume.weights.size());
  lift.matrix.leftCols(cell_local) =
      -(phi.dx.transpose() * w.asDiagonal() * kit.cell.dx + phi.dy.transpose() * w.asDiagonal() * kit.cell.dy);

  for (int side = 0; side < 3; ++side) {
    const auto& s = kit.sides[side];
    const MatrixT<Real> phi_e = eval(lift.basis, s.points, 0).value;
    const VectorT<Real> ws = Eigen::Map<const VectorT<Real>>(s.weights.data(), s.weights.size());
    lift.matrix.middleCols(cell_local + side * edge_local, edge_local) =
        s.sigma * (phi_e.transpose() * ws.asDiagonal() * s.edge_basis);
  }
  return lift;
}

template <class Real>
BasicLocalWeakLap<Real> local_weak_laplacian(const BasicElementKit<Real>& kit, const DofMap& dm, int lift_degree) {
  if (!dm.has_edge_dofs) {
    throw Error(ErrorKind::dimension, "the weak Laplacian needs the edge unknowns");
  }
  return local_weak_laplacian(kit, dm.cell_local, dm.edge_local, lift_degree);
}

/// Lift of degree k+3 unless another degree is requested.
template <class Real = double>
BasicLocalWeakLap<Real> local_weak_laplacian(const Mesh& mesh, const DofMap& dm, int tri, int lift_degree = -1) {
  const BasicElementKit<Real> kit = make_element_kit<Real>(mesh, dm, tri, QuadratureChoice::for_k(dm.k), 1);
  return local_weak_laplacian(kit, dm, lift_degree < 0 ? dm.k + 3 : lift_degree);
}

/// Lifts for every element of the mesh.
template <class Real = double>
std::vector<BasicLocalWeakLap<Real>> all_weak_laplacians(const Mesh& mesh, const DofMap& dm, int lift_degree = -1) {
  std::vector<BasicLocalWeakLap<Real>> out;
  out.reserve(mesh.num_triangles());
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    out.push_back(local_weak_laplacian<Real>(mesh, dm, t, lift_degree));
  }
  return out;
}

}  // namespace c0wg
