#pragma once

// Interpolants and the error norms reported by the convergence studies.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "c0wg/assemble.hpp"
#include "c0wg/element.hpp"
#include "c0wg/errors.hpp"
#include "c0wg/mesh.hpp"
#include "c0wg/space.hpp"
#include "c0wg/weaklap.hpp"

namespace c0wg {

/// A smooth exact solution with the derivatives the norms need; f is the
/// bilaplacian of u.
struct ExactSolution {
  std::function<double(const Point2&)> u;
  std::function<Vec2(const Point2&)> grad;
  std::function<Eigen::Matrix2d(const Point2&)> hess;
  std::function<double(const Point2&)> laplacian;
  std::function<double(const Point2&)> f;

  BoundaryData boundary() const {
    return {u, [g = grad](const Point2& p, const Vec2& n) { return g(p).dot(n); }};
  }

  /// u = sin(pi x) sin(pi y), f = 4 pi^4 sin(pi x) sin(pi y).
  static ExactSolution sine_product() {
    using std::cos, std::sin;
    constexpr double pi = std::numbers::pi;
    ExactSolution s;
    s.u = [](const Point2& p) { return sin(pi * p.x()) * sin(pi * p.y()); };
    s.grad = [](const Point2& p) {
      return Vec2(pi * cos(pi * p.x()) * sin(pi * p.y()), pi * sin(pi * p.x()) * cos(pi * p.y()));
    };
    s.hess = [](const Point2& p) {
      const double sx = sin(pi * p.x()), sy = sin(pi * p.y());
      const double cx = cos(pi * p.x()), cy = cos(pi * p.y());
      Eigen::Matrix2d h;
      h << -pi * pi * sx * sy, pi * pi * cx * cy, pi * pi * cx * cy, -pi * pi * sx * sy;
      return h;
    };
    s.laplacian = [](const Point2& p) { return -2.0 * pi * pi * sin(pi * p.x()) * sin(pi * p.y()); };
    s.f = [](const Point2& p) { return 4.0 * std::pow(pi, 4) * sin(pi * p.x()) * sin(pi * p.y()); };
    return s;
  }
};

/// Compare the supplied derivatives with central differences at a grid of
/// points in (0,1)^2. Returns the worst relative mismatch; each derivative
/// level is measured against its own magnitude over the sample.
inline double exact_solution_mismatch(const ExactSolution& ex) {
  std::vector<Point2> pts;
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 5; ++j) pts.emplace_back(0.17 * i - 0.02, 0.16 * j + 0.013);
  }
  const double h = 1e-4;
  const Vec2 ex1(h, 0), ey1(0, h);
  double worst = 0.0;
  const auto rel = [](double err, double scale) { return err / std::max(scale, 1e-12); };
  double s_grad = 0, s_hess = 0, s_lap = 0, s_f = 0;
  for (const auto& p : pts) {
    s_grad = std::max(s_grad, ex.grad(p).cwiseAbs().maxCoeff());
    s_hess = std::max(s_hess, ex.hess(p).cwiseAbs().maxCoeff());
    s_lap = std::max(s_lap, std::abs(ex.laplacian(p)));
    s_f = std::max(s_f, std::abs(ex.f(p)));
  }
  const double H = 1e-3;
  for (const auto& p : pts) {
    const Vec2 fd_grad((ex.u(p + ex1) - ex.u(p - ex1)) / (2 * h), (ex.u(p + ey1) - ex.u(p - ey1)) / (2 * h));
    worst = std::max(worst, rel((fd_grad - ex.grad(p)).cwiseAbs().maxCoeff(), s_grad));
    Eigen::Matrix2d fd_hess;
    fd_hess.col(0) = (ex.grad(p + ex1) - ex.grad(p - ex1)) / (2 * h);
    fd_hess.col(1) = (ex.grad(p + ey1) - ex.grad(p - ey1)) / (2 * h);
    worst = std::max(worst, rel((fd_hess - ex.hess(p)).cwiseAbs().maxCoeff(), s_hess));
    worst = std::max(worst, rel(std::abs(ex.hess(p).trace() - ex.laplacian(p)), s_lap));
    const Vec2 hx(H, 0), hy(0, H);
    const double fd_f = (ex.laplacian(p + hx) + ex.laplacian(p - hx) + ex.laplacian(p + hy) +
                         ex.laplacian(p - hy) - 4.0 * ex.laplacian(p)) /
                        (H * H);
    worst = std::max(worst, rel(std::abs(fd_f - ex.f(p)), s_f));
  }
  return worst;
}

inline void check_exact_solution(const ExactSolution& ex, double tol = 1e-6) {
  const double mismatch = exact_solution_mismatch(ex);
  if (!(mismatch <= tol)) {
    throw Error(ErrorKind::invariant,
                "exact solution derivatives are inconsistent (relative mismatch " + std::to_string(mismatch) + ")");
  }
}

/// Q_h u: Lagrange interpolation of u at the cell nodes, and the L2
/// projection of grad u . n_e onto P_{k+1}(e) on every edge.
inline FieldVector interpolate_Qh(const std::function<double(const Point2&)>& u,
                                  const std::function<Vec2(const Point2&)>& grad, const Mesh& mesh,
                                  const DofMap& dm) {
  FieldVector out(dm);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const auto ids = dm.dofs(t);
    const auto nodes = lagrange_nodes(mesh, t, dm.degree);
    for (int i = 0; i < dm.cell_local; ++i) out.values(ids[i]) = u(nodes[i]);
  }
  if (dm.has_edge_dofs) {
    const LineRule line = edge_quadrature(QuadratureChoice::for_k(dm.k).edge_points);
    for (int e = 0; e < dm.n_edges; ++e) {
      const EdgeBasis eb = build_edge_basis(mesh, e, dm.k + 1);
      const Vec2& n = mesh.edges[e].normal;
      for (std::size_t q = 0; q < line.size(); ++q) {
        const std::array<double, 1> tp{line.points[q](0)};
        const Eigen::MatrixXd chi = eval(eb, tp, 0);
        const double dn = grad(eb.point(tp[0])).dot(n);
        for (int l = 0; l < dm.edge_local; ++l) {
          out.values(dm.edge_dof(e, l)) += line.weights[q] * eb.length * dn * chi(0, l);
        }
      }
    }
  }
  return out;
}

inline FieldVector interpolate_Qh(const ExactSolution& ex, const Mesh& mesh, const DofMap& dm) {
  return interpolate_Qh(ex.u, ex.grad, mesh, dm);
}

/// |||v||| = (sum_K ||lift v||_K^2)^(1/2); the lifts are orthonormal-basis
/// coefficient maps, so each element contributes a squared coefficient norm.
inline double triple_bar_norm(const FieldVector& v, const DofMap& dm, std::span<const LocalWeakLap> lifts) {
  if (static_cast<int>(lifts.size()) != dm.n_triangles) {
    throw Error(ErrorKind::dimension, "one lift per element is required");
  }
  double sum = 0.0;
  for (const auto& lift : lifts) sum += lift.apply(v.local(dm, lift.element)).squaredNorm();
  return std::sqrt(sum);
}

/// Energy norm of the stabilised method: lift of degree k plus the
/// normal-derivative mismatch term.
inline double c0wg_energy_norm(const FieldVector& v, const Mesh& mesh, const DofMap& dm) {
  double sum = 0.0;
  const auto quad = QuadratureChoice::for_k(dm.k);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const ElementKit kit = make_element_kit(mesh, dm, t, quad, 1);
    const Eigen::VectorXd local = v.local(dm, t);
    sum += local.dot((lift_element_matrix(local_weak_laplacian(kit, dm, dm.k)) +
                      stabilizer_element_matrix(kit, dm)) *
                     local);
  }
  return std::sqrt(std::max(sum, 0.0));
}

/// ||v||_{2,h} = (sum_K ||lap v0||_K^2 + h_K^-1 ||d v0/d n_e - vn||_{dK}^2)^(1/2).
inline double norm_2h(const FieldVector& v, const Mesh& mesh, const DofMap& dm) {
  if (!dm.has_edge_dofs) throw Error(ErrorKind::dimension, "norm_2h needs the edge unknowns");
  double sum = 0.0;
  const auto quad = QuadratureChoice::for_k(dm.k);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const ElementKit kit = make_element_kit(mesh, dm, t, quad, 2);
    const Eigen::VectorXd local = v.local(dm, t);
    const Eigen::VectorXd c = local.head(dm.cell_local);
    const Eigen::VectorXd lap = kit.cell.laplacian() * c;
    for (std::size_t q = 0; q < kit.volume.weights.size(); ++q) sum += kit.volume.weights[q] * lap(q) * lap(q);
    for (int side = 0; side < 3; ++side) {
      const auto& s = kit.sides[side];
      const Eigen::VectorXd mismatch = (s.cell.dx * s.normal.x() + s.cell.dy * s.normal.y()) * c -
                                       s.edge_basis * local.segment(dm.cell_local + side * dm.edge_local, dm.edge_local);
      for (std::size_t q = 0; q < s.weights.size(); ++q) sum += s.weights[q] * mismatch(q) * mismatch(q) / kit.diameter;
    }
  }
  return std::sqrt(sum);
}

struct L2H1Errors {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

/// ||u - u0|| and ||grad(u - u0)|| by element quadrature of degree 2k+8.
inline L2H1Errors l2_h1_errors(const FieldVector& uh, const ExactSolution& ex, const Mesh& mesh, const DofMap& dm) {
  L2H1Errors out;
  const auto quad = QuadratureChoice::for_k(dm.k);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const ElementKit kit = make_element_kit(mesh, dm, t, quad, 1);
    const Eigen::VectorXd c = uh.local(dm, t).head(dm.cell_local);
    const Eigen::VectorXd val = kit.cell.value * c;
    const Eigen::VectorXd gx = kit.cell.dx * c;
    const Eigen::VectorXd gy = kit.cell.dy * c;
    for (std::size_t q = 0; q < kit.volume.weights.size(); ++q) {
      const Point2& p = kit.volume.points[q];
      const double w = kit.volume.weights[q];
      const double e = ex.u(p) - val(q);
      const Vec2 ge = ex.grad(p) - Vec2(gx(q), gy(q));
      out.l2 += w * e * e;
      out.h1_semi += w * ge.squaredNorm();
    }
  }
  out.l2 = std::sqrt(out.l2);
  out.h1_semi = std::sqrt(out.h1_semi);
  return out;
}

/// ||u - u_h||_dg: broken H2 seminorm plus h_e^-1-weighted gradient jumps on
/// all edges (on the boundary the jump is the outward normal derivative).
inline double dg_norm_error(const FieldVector& uh, const ExactSolution& ex, const Mesh& mesh, const DofMap& dm) {
  double sum = 0.0;
  const auto quad = QuadratureChoice::for_k(dm.k);
  for (int t = 0; t < dm.n_triangles; ++t) {
    const ElementKit kit = make_element_kit(mesh, dm, t, quad, 2);
    const Eigen::VectorXd c = uh.local(dm, t).head(dm.cell_local);
    const Eigen::VectorXd hxx = kit.cell.dxx * c, hxy = kit.cell.dxy * c, hyy = kit.cell.dyy * c;
    for (std::size_t q = 0; q < kit.volume.weights.size(); ++q) {
      const Eigen::Matrix2d he = ex.hess(kit.volume.points[q]);
      const double exx = he(0, 0) - hxx(q), exy = he(0, 1) - hxy(q), eyy = he(1, 1) - hyy(q);
      sum += kit.volume.weights[q] * (exx * exx + 2.0 * exy * exy + eyy * eyy);
    }
  }
  const LineRule line = edge_quadrature(quad.edge_points);
  for (int e = 0; e < dm.n_edges; ++e) {
    const auto tr = detail::edge_traces(mesh, dm, e, line);
    Eigen::VectorXd c(tr.ids.size());
    for (std::size_t i = 0; i < tr.ids.size(); ++i) c(i) = uh.values(tr.ids[i]);
    Eigen::VectorXd jump = -(tr.jump * c);
    if (mesh.edges[e].is_boundary) {
      for (std::size_t q = 0; q < tr.points.size(); ++q) jump(q) += ex.grad(tr.points[q]).dot(tr.outward);
    }
    for (std::size_t q = 0; q < tr.points.size(); ++q) sum += tr.weights[q] * jump(q) * jump(q) / tr.length;
  }
  return std::sqrt(sum);
}

/// Coefficients of the element L2 projection of w onto P_{k+3}(K) in the
/// orthonormal basis `basis`.
inline Eigen::VectorXd project_pi_h(const std::function<double(const Point2&)>& w, const Mesh& mesh, int tri,
                                    const TriBasis& basis, int quad_degree) {
  const PhysicalRule rule = map_rule(triangle_quadrature(quad_degree), mesh.corners(tri));
  const Eigen::MatrixXd phi = eval(basis, rule.points, 0).value;
  Eigen::VectorXd wq(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) wq(q) = rule.weights[q] * w(rule.points[q]);
  return phi.transpose() * wq;
}

}  // namespace c0wg
