#pragma once

// Global systems for the three discretisations of the biharmonic problem:
//
//   sfc0wg  (lift_{k+3} v, lift_{k+3} w)
//   c0wg    (lift_k v, lift_k w) + sum_K h_K^-1 <d v0/d n_e - vn, d w0/d n_e - wn>_{dK}
//   c0ip    (D2 v, D2 w) - <[[grad v]], {{d2 w/d n_e2}}> - <[[grad w]], {{d2 v/d n_e2}}>
//           + eta h_e^-1 <[[grad v]], [[grad w]]>          (cell unknowns only)
//
// Assembly produces the unconstrained system; apply_bcs eliminates the
// boundary unknowns symmetrically.
//
// Element matrices are computed and summed in long double and the system
// keeps that copy next to the double one. The matrices have condition numbers
// of order h^-4, and on a structured mesh rounding every element matrix to
// double perturbs all elements alike, which caps the accuracy at the finest
// levels. The direct solver factors the double matrix and refines against the
// extended one.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "c0wg/element.hpp"
#include "c0wg/errors.hpp"
#include "c0wg/mesh.hpp"
#include "c0wg/space.hpp"
#include "c0wg/weaklap.hpp"

namespace c0wg {

enum class Method { sfc0wg, c0wg, c0ip };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::sfc0wg: return "sfc0wg";
    case Method::c0wg: return "c0wg";
    case Method::c0ip: return "c0ip";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "sfc0wg") return Method::sfc0wg;
  if (s == "c0wg") return Method::c0wg;
  if (s == "c0ip") return Method::c0ip;
  throw Error(ErrorKind::config, "unknown method '" + s + "'");
}

inline bool uses_edge_unknowns(Method m) { return m != Method::c0ip; }

/// C0IP penalty used when none is given: 2(k+2)^2.
inline double default_eta(int k) { return 2.0 * (k + 2) * (k + 2); }

using ScalarField = std::function<double(const Point2&)>;

/// Dirichlet value and outward normal derivative on the boundary.
struct BoundaryData {
  ScalarField g_dirichlet;
  std::function<double(const Point2&, const Vec2& outward)> g_neumann;

  static BoundaryData homogeneous() {
    return {[](const Point2&) { return 0.0; }, [](const Point2&, const Vec2&) { return 0.0; }};
  }
};

using Extended = long double;
using SparseMatrix = Eigen::SparseMatrix<double>;
using SparseMatrixExt = Eigen::SparseMatrix<Extended>;
using VectorExt = VectorT<Extended>;

struct SparseSystem {
  Method method = Method::sfc0wg;
  int k = 0;
  double eta = 0.0;
  int n_global = 0;
  /// matrix_ext and rhs_ext rounded to double.
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  SparseMatrixExt matrix_ext;
  VectorExt rhs_ext;
  std::vector<int> free_to_global;
  /// Values of the eliminated unknowns, indexed globally (zero elsewhere).
  Eigen::VectorXd fixed_values;
  std::vector<char> constrained;
  bool boundary_applied = false;

  int n_free() const { return static_cast<int>(free_to_global.size()); }
};

namespace detail {

inline void check_dims(const Mesh& mesh, const DofMap& dm, int k, Method method) {
  if (dm.k != k) throw Error(ErrorKind::dimension, "DOF map was built for a different k");
  if (dm.n_triangles != static_cast<int>(mesh.num_triangles()) ||
      dm.n_edges != static_cast<int>(mesh.num_edges()) ||
      dm.n_vertices != static_cast<int>(mesh.num_vertices())) {
    throw Error(ErrorKind::dimension, "DOF map does not belong to this mesh");
  }
  if (uses_edge_unknowns(method) && !dm.has_edge_dofs) {
    throw Error(ErrorKind::dimension, to_string(method) + " needs the edge unknowns");
  }
}

template <class Real>
VectorT<Real> weights_of(const std::vector<Real>& w) {
  return Eigen::Map<const VectorT<Real>>(w.data(), static_cast<Eigen::Index>(w.size()));
}

/// Sums the symmetric parts of local matrices. Triplets are flushed in
/// batches to bound memory; zero entries are kept so the pattern stays
/// structurally symmetric.
template <class Real>
class SparseAccumulator {
 public:
  explicit SparseAccumulator(int n) : n_(n), sum_(n, n) {}

  void add(std::span<const int> ids, const MatrixT<Real>& local) {
    for (Eigen::Index i = 0; i < local.rows(); ++i) {
      for (Eigen::Index j = 0; j < local.cols(); ++j) {
        triplets_.emplace_back(ids[i], ids[j], (local(i, j) + local(j, i)) / 2);
      }
    }
    if (triplets_.size() >= batch) flush();
  }

  Eigen::SparseMatrix<Real> finish() {
    flush();
    return std::move(sum_);
  }

 private:
  static constexpr std::size_t batch = std::size_t{1} << 22;

  void flush() {
    if (triplets_.empty()) return;
    Eigen::SparseMatrix<Real> part(n_, n_);
    part.setFromTriplets(triplets_.begin(), triplets_.end());
    if (sum_.nonZeros() == 0) {
      sum_ = std::move(part);
    } else {
      sum_ = sum_ + part;
    }
    triplets_.clear();
  }

  int n_;
  Eigen::SparseMatrix<Real> sum_;
  std::vector<Eigen::Triplet<Real>> triplets_;
};

/// (f, N_i)_K for the cell shape functions.
template <class Real>
VectorT<Real> cell_load(const BasicElementKit<Real>& kit, const ScalarField& f) {
  VectorT<Real> fq(kit.volume.points.size());
  for (std::size_t q = 0; q < kit.volume.points.size(); ++q) {
    fq(q) = Real(f(kit.volume.points[q].template cast<double>())) * kit.volume.weights[q];
  }
  return kit.cell.value.transpose() * fq;
}

inline SparseSystem start_system(Method method, const DofMap& dm, double eta) {
  SparseSystem sys;
  sys.method = method;
  sys.k = dm.k;
  sys.eta = eta;
  sys.n_global = dm.n_total;
  sys.rhs_ext = VectorExt::Zero(dm.n_total);
  sys.free_to_global.resize(dm.n_total);
  for (int i = 0; i < dm.n_total; ++i) sys.free_to_global[i] = i;
  sys.fixed_values = Eigen::VectorXd::Zero(dm.n_total);
  sys.constrained.assign(dm.n_total, 0);
  return sys;
}

inline void finish_system(SparseSystem& sys, SparseAccumulator<Extended>& acc) {
  sys.matrix_ext = acc.finish();
  sys.matrix = sys.matrix_ext.cast<double>();
  sys.rhs = sys.rhs_ext.cast<double>();
}

}  // namespace detail

/// Element matrix W^T W of the lift. With an orthonormal test basis the L2
/// product of two lifts is the dot product of their coefficient vectors.
template <class Real>
MatrixT<Real> lift_element_matrix(const BasicLocalWeakLap<Real>& lift) {
  return lift.matrix.transpose() * lift.matrix;
}

/// sum over sides of h_K^-1 <d v0/d n_e - vn, d w0/d n_e - wn>_e on one
/// element, in local DOF order.
template <class Real>
MatrixT<Real> stabilizer_element_matrix(const BasicElementKit<Real>& kit, const DofMap& dm) {
  const int n = dm.local_size();
  MatrixT<Real> out = MatrixT<Real>::Zero(n, n);
  for (int side = 0; side < 3; ++side) {
    const auto& s = kit.sides[side];
    MatrixT<Real> rows = MatrixT<Real>::Zero(static_cast<Eigen::Index>(s.points.size()), n);
    rows.leftCols(dm.cell_local) = s.cell.dx * s.normal.x() + s.cell.dy * s.normal.y();
    rows.middleCols(dm.cell_local + side * dm.edge_local, dm.edge_local) = -s.edge_basis;
    out += rows.transpose() * detail::weights_of(s.weights).asDiagonal() * rows / kit.diameter;
  }
  return out;
}

inline SparseSystem assemble_sfc0wg(const Mesh& mesh, const DofMap& dm, int k, const ScalarField& f) {
  detail::check_dims(mesh, dm, k, Method::sfc0wg);
  SparseSystem sys = detail::start_system(Method::sfc0wg, dm, 0.0);
  detail::SparseAccumulator<Extended> acc(dm.n_total);
  const auto quad = QuadratureChoice::for_k(k);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const auto kit = make_element_kit<Extended>(mesh, dm, t, quad, 1);
    const auto lift = local_weak_laplacian(kit, dm, k + 3);
    const auto ids = dm.dofs(t);
    acc.add(ids, lift_element_matrix(lift));
    const VectorExt load = detail::cell_load(kit, f);
    for (int i = 0; i < dm.cell_local; ++i) sys.rhs_ext(ids[i]) += load(i);
  }
  detail::finish_system(sys, acc);
  return sys;
}

inline SparseSystem assemble_c0wg(const Mesh& mesh, const DofMap& dm, int k, const ScalarField& f) {
  detail::check_dims(mesh, dm, k, Method::c0wg);
  SparseSystem sys = detail::start_system(Method::c0wg, dm, 0.0);
  detail::SparseAccumulator<Extended> acc(dm.n_total);
  const auto quad = QuadratureChoice::for_k(k);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const auto kit = make_element_kit<Extended>(mesh, dm, t, quad, 1);
    const auto lift = local_weak_laplacian(kit, dm, k);
    const auto ids = dm.dofs(t);
    acc.add(ids, MatrixT<Extended>(lift_element_matrix(lift) + stabilizer_element_matrix(kit, dm)));
    const VectorExt load = detail::cell_load(kit, f);
    for (int i = 0; i < dm.cell_local; ++i) sys.rhs_ext(ids[i]) += load(i);
  }
  detail::finish_system(sys, acc);
  return sys;
}

namespace detail {

/// Jump and second-normal-derivative average rows of the cell shape
/// functions on one edge, over the union of the adjacent elements' DOFs.
template <class Real>
struct BasicEdgeTraces {
  std::vector<int> ids;
  MatrixT<Real> jump;     // points x ids: [[grad v]]
  MatrixT<Real> average;  // points x ids: {{d2 v / d n_e2}}
  std::vector<Point2T<Real>> points;
  std::vector<Real> weights;
  Point2T<Real> outward = Point2T<Real>::Zero();  // boundary edges only
  Real length = 0;
};

using EdgeTraces = BasicEdgeTraces<double>;

template <class Real = double>
BasicEdgeTraces<Real> edge_traces(const Mesh& mesh, const DofMap& dm, int e, const QuadratureRule<1, Real>& line) {
  const Edge& edge = mesh.edges[e];
  BasicEdgeTraces<Real> out;
  const BasicEdgeBasis<Real> eb = build_edge_basis<Real>(mesh, e, 0);
  out.length = eb.length;
  for (std::size_t q = 0; q < line.size(); ++q) {
    out.points.push_back(eb.point(line.points[q](0)));
    out.weights.push_back(line.weights[q] * eb.length);
  }
  const int np = static_cast<int>(out.points.size());
  std::vector<int> adjacent;
  for (int t : {edge.left_tri, edge.right_tri}) {
    if (t != no_triangle) adjacent.push_back(t);
  }
  const Real avg = adjacent.size() == 2 ? Real(1) / 2 : Real(1);
  out.jump = MatrixT<Real>::Zero(np, dm.cell_local * static_cast<int>(adjacent.size()));
  out.average = out.jump;
  const Point2T<Real> n = edge_normal<Real>(mesh, e);
  int offset = 0;
  for (int t : adjacent) {
    const auto& tri = mesh.triangles[t];
    int side = 0;
    while (tri.edge_ids[side] != e) ++side;
    const Point2T<Real> n_out = Real(mesh.sigma(t, side)) * n;
    const auto vt = eval(lagrange_basis(mesh.corners_as<Real>(t), dm.degree), out.points, 2);
    out.jump.middleCols(offset, dm.cell_local) = vt.dx * n_out.x() + vt.dy * n_out.y();
    out.average.middleCols(offset, dm.cell_local) =
        avg * (vt.dxx * (n.x() * n.x()) + vt.dxy * (2 * n.x() * n.y()) + vt.dyy * (n.y() * n.y()));
    const auto ids = dm.dofs(t);
    out.ids.insert(out.ids.end(), ids.begin(), ids.begin() + dm.cell_local);
    if (adjacent.size() == 1) out.outward = n_out;
    offset += dm.cell_local;
  }
  return out;
}

}  // namespace detail

inline SparseSystem assemble_c0ip(const Mesh& mesh, const DofMap& dm, int k, const ScalarField& f, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorKind::config, "penalty eta must be positive");
  detail::check_dims(mesh, dm, k, Method::c0ip);
  SparseSystem sys = detail::start_system(Method::c0ip, dm, eta);
  detail::SparseAccumulator<Extended> acc(dm.n_total);
  const auto quad = QuadratureChoice::for_k(k);
  const int nc = dm.cell_local;
  for (int t = 0; t < dm.n_triangles; ++t) {
    const auto kit = make_element_kit<Extended>(mesh, dm, t, quad, 2);
    const VectorExt w = detail::weights_of(kit.volume.weights);
    const auto& c = kit.cell;
    const MatrixT<Extended> local = c.dxx.transpose() * w.asDiagonal() * c.dxx +
                                    Extended(2) * (c.dxy.transpose() * w.asDiagonal() * c.dxy) +
                                    c.dyy.transpose() * w.asDiagonal() * c.dyy;
    const auto ids = dm.dofs(t).first(nc);
    acc.add(ids, local);
    const VectorExt load = detail::cell_load(kit, f);
    for (int i = 0; i < nc; ++i) sys.rhs_ext(ids[i]) += load(i);
  }
  const auto line = edge_quadrature<Extended>(quad.edge_points);
  for (int e = 0; e < dm.n_edges; ++e) {
    const auto tr = detail::edge_traces<Extended>(mesh, dm, e, line);
    const VectorExt w = detail::weights_of(tr.weights);
    const MatrixT<Extended> ja = tr.jump.transpose() * w.asDiagonal() * tr.average;
    const MatrixT<Extended> local =
        -ja - ja.transpose() + (Extended(eta) / tr.length) * (tr.jump.transpose() * w.asDiagonal() * tr.jump);
    acc.add(tr.ids, local);
  }
  detail::finish_system(sys, acc);
  return sys;
}

inline SparseSystem assemble(Method method, const Mesh& mesh, const DofMap& dm, const ScalarField& f,
                             double eta = 0.0) {
  switch (method) {
    case Method::sfc0wg: return assemble_sfc0wg(mesh, dm, dm.k, f);
    case Method::c0wg: return assemble_c0wg(mesh, dm, dm.k, f);
    case Method::c0ip: return assemble_c0ip(mesh, dm, dm.k, f, eta > 0.0 ? eta : default_eta(dm.k));
  }
  throw Error(ErrorKind::config, "unknown method");
}

/// Boundary values of the unknowns fixed by the boundary conditions:
/// Lagrange interpolation of g_D at boundary cell nodes, and the edge L2
/// projection of sigma_e g_N (the derivative along the fixed normal) on
/// boundary edges.
inline Eigen::VectorXd boundary_values(const Mesh& mesh, const DofMap& dm, const BoundaryData& bc) {
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(dm.n_total);
  const LineRule line = edge_quadrature(QuadratureChoice::for_k(dm.k).edge_points);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const auto ids = dm.dofs(t);
    const auto nodes = lagrange_nodes(mesh, t, dm.degree);
    for (int i = 0; i < dm.cell_local; ++i) {
      if (dm.boundary_cell_mask[ids[i]]) vals(ids[i]) = bc.g_dirichlet(nodes[i]);
    }
  }
  if (dm.has_edge_dofs) {
    for (int e = 0; e < dm.n_edges; ++e) {
      const Edge& edge = mesh.edges[e];
      if (!edge.is_boundary) continue;
      const double sigma = edge.left_tri != no_triangle ? 1.0 : -1.0;
      const Vec2 outward = sigma * edge.normal;
      const EdgeBasis eb = build_edge_basis(mesh, e, dm.k + 1);
      for (std::size_t q = 0; q < line.size(); ++q) {
        const double s = line.points[q](0);
        const std::array<double, 1> sp{s};
        const Eigen::MatrixXd chi = eval(eb, sp, 0);
        const double datum = sigma * bc.g_neumann(eb.point(s), outward);
        for (int l = 0; l < dm.edge_local; ++l) {
          vals(dm.edge_dof(e, l)) += line.weights[q] * eb.length * datum * chi(0, l);
        }
      }
    }
  }
  return vals;
}

/// Nitsche-type boundary load of the C0IP form for nonzero g_N:
/// -<g_N, d2 v/d n_e2>_e + eta h_e^-1 <g_N, grad v . n>_e on boundary edges.
inline VectorExt c0ip_neumann_load(const Mesh& mesh, const DofMap& dm, const BoundaryData& bc, double eta) {
  VectorExt load = VectorExt::Zero(dm.n_total);
  const auto line = edge_quadrature<Extended>(QuadratureChoice::for_k(dm.k).edge_points);
  for (int e = 0; e < dm.n_edges; ++e) {
    if (!mesh.edges[e].is_boundary) continue;
    const auto tr = detail::edge_traces<Extended>(mesh, dm, e, line);
    const Vec2 outward = tr.outward.cast<double>();
    VectorExt gw(tr.points.size());
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      gw(q) = tr.weights[q] * Extended(bc.g_neumann(tr.points[q].cast<double>(), outward));
    }
    const VectorExt local = -(tr.average.transpose() * gw) + (Extended(eta) / tr.length) * (tr.jump.transpose() * gw);
    for (std::size_t i = 0; i < tr.ids.size(); ++i) load(tr.ids[i]) += local(i);
  }
  return load;
}

/// Fix the boundary unknowns to their boundary values and eliminate them
/// symmetrically: rhs_free -= A_free,fixed * x_fixed, fixed rows and columns
/// removed.
inline SparseSystem apply_bcs(const SparseSystem& sys, const DofMap& dm, const Mesh& mesh, const BoundaryData& bc) {
  if (sys.boundary_applied) throw Error(ErrorKind::invariant, "boundary conditions already applied");
  if (sys.n_global != dm.n_total) throw Error(ErrorKind::dimension, "system does not match the DOF map");
  SparseSystem out;
  out.method = sys.method;
  out.k = sys.k;
  out.eta = sys.eta;
  out.n_global = sys.n_global;
  out.boundary_applied = true;

  const std::vector<int> fixed = restrict_to_v0(dm);
  out.constrained.assign(dm.n_total, 0);
  for (int i : fixed) out.constrained[i] = 1;
  const Eigen::VectorXd all_values = boundary_values(mesh, dm, bc);
  out.fixed_values = Eigen::VectorXd::Zero(dm.n_total);
  for (int i : fixed) out.fixed_values(i) = all_values(i);

  VectorExt rhs = sys.rhs_ext;
  if (sys.method == Method::c0ip) rhs += c0ip_neumann_load(mesh, dm, bc, sys.eta);

  std::vector<int> global_to_free(dm.n_total, -1);
  for (int i = 0; i < dm.n_total; ++i) {
    if (!out.constrained[i]) {
      global_to_free[i] = static_cast<int>(out.free_to_global.size());
      out.free_to_global.push_back(i);
    }
  }
  const int nf = out.n_free();
  out.rhs_ext.resize(nf);
  for (int r = 0; r < nf; ++r) out.rhs_ext(r) = rhs(out.free_to_global[r]);

  std::vector<Eigen::Triplet<Extended>> triplets;
  triplets.reserve(sys.matrix_ext.nonZeros());
  for (int col = 0; col < sys.matrix_ext.outerSize(); ++col) {
    for (SparseMatrixExt::InnerIterator it(sys.matrix_ext, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      const int fr = global_to_free[row];
      if (fr < 0) continue;
      const int fc = global_to_free[col];
      if (fc >= 0) {
        triplets.emplace_back(fr, fc, it.value());
      } else {
        out.rhs_ext(fr) -= it.value() * Extended(out.fixed_values(col));
      }
    }
  }
  out.matrix_ext.resize(nf, nf);
  out.matrix_ext.setFromTriplets(triplets.begin(), triplets.end());
  out.matrix = out.matrix_ext.cast<double>();
  out.rhs = out.rhs_ext.cast<double>();
  return out;
}

}  // namespace c0wg
