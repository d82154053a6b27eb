#pragma once

// Helpers shared by the unit tests and the acceptance binary: small meshes,
// polynomial exact solutions, random fields, and an independent dense
// monomial implementation of the weak Laplacian used as an oracle.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "c0wg/c0wg.hpp"

namespace c0wg::testing {

/// One triangle with corners a, b, c; `order` fixes which corner gets which
/// global vertex id, so the edge orientations can be varied.
inline Mesh single_triangle(const Point2& a, const Point2& b, const Point2& c, std::array<int, 3> order = {0, 1, 2}) {
  Mesh m;
  m.vertices.resize(3);
  const std::array<Point2, 3> p{a, b, c};
  for (int i = 0; i < 3; ++i) m.vertices[order[i]] = p[i];
  Triangle t;
  t.vertex_ids = order;
  if (detail::signed_area(a, b, c) < 0.0) std::swap(t.vertex_ids[1], t.vertex_ids[2]);
  m.triangles.push_back(t);
  return build_edges(std::move(m));
}

/// A triangle with angles bounded away from 0 and pi, diameter about `scale`.
inline std::array<Point2, 3> random_triangle(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Point2 shift(3.0 * u(rng), 3.0 * u(rng));
    std::array<Point2, 3> v{Point2(u(rng), u(rng)), Point2(u(rng), u(rng)), Point2(u(rng), u(rng))};
    double min_angle = M_PI;
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = v[(i + 1) % 3] - v[i];
      const Vec2 b = v[(i + 2) % 3] - v[i];
      min_angle = std::min(min_angle, std::acos(a.dot(b) / (a.norm() * b.norm())));
    }
    if (min_angle < 0.35) continue;
    for (auto& p : v) p = shift + scale * p;
    return v;
  }
}

inline std::array<int, 3> random_order(std::mt19937& rng) {
  std::array<int, 3> o{0, 1, 2};
  std::shuffle(o.begin(), o.end(), rng);
  return o;
}

/// u = x^2 + xy + y^2 (biharmonic, in P_2).
inline ExactSolution quadratic_solution() {
  ExactSolution s;
  s.u = [](const Point2& p) { return p.x() * p.x() + p.x() * p.y() + p.y() * p.y(); };
  s.grad = [](const Point2& p) { return Vec2(2 * p.x() + p.y(), p.x() + 2 * p.y()); };
  s.hess = [](const Point2&) { return (Eigen::Matrix2d() << 2, 1, 1, 2).finished(); };
  s.laplacian = [](const Point2&) { return 4.0; };
  s.f = [](const Point2&) { return 0.0; };
  return s;
}

/// u = x^3 - 3 x y^2 (harmonic, in P_3).
inline ExactSolution cubic_solution() {
  ExactSolution s;
  s.u = [](const Point2& p) { return p.x() * p.x() * p.x() - 3 * p.x() * p.y() * p.y(); };
  s.grad = [](const Point2& p) { return Vec2(3 * p.x() * p.x() - 3 * p.y() * p.y(), -6 * p.x() * p.y()); };
  s.hess = [](const Point2& p) { return (Eigen::Matrix2d() << 6 * p.x(), -6 * p.y(), -6 * p.y(), -6 * p.x()).finished(); };
  s.laplacian = [](const Point2&) { return 0.0; };
  s.f = [](const Point2&) { return 0.0; };
  return s;
}

/// Random element of V_h^0: free unknowns uniform in [-1,1], constrained ones 0.
inline FieldVector random_v0(const DofMap& dm, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldVector v(dm);
  for (int i = 0; i < dm.n_total; ++i) {
    if (!dm.boundary_cell_mask[i] && !dm.boundary_edge_mask[i]) v.values(i) = u(rng);
  }
  return v;
}

/// Independent weak Laplacian: monomials ((x - xc)/h)^a ((y - yc)/h)^b, a
/// dense mass matrix solve, and its own Legendre edge basis, Lagrange
/// interpolation, normal and orientation logic. Returns the lift's values at
/// `points` for the local DOF vector `local` of triangle `tri`.
class DenseLift {
 public:
  DenseLift(const Mesh& mesh, int tri, int k, int degree) : k_(k), m_(degree) {
    v_ = mesh.corners(tri);
    ids_ = mesh.triangles[tri].vertex_ids;
    centre_ = (v_[0] + v_[1] + v_[2]) / 3.0;
    for (int i = 0; i < 3; ++i) scale_ = std::max(scale_, (v_[(i + 1) % 3] - v_[i]).norm());
    const auto rule = map_rule(triangle_quadrature(std::min(20, 2 * m_ + 2 * (k + 2))), v_);
    vol_pts_ = rule.points;
    vol_w_ = rule.weights;
    line_ = edge_quadrature(std::min(16, m_ + k + 4));
  }

  std::vector<double> values(const Eigen::VectorXd& local, const std::vector<Point2>& points) const {
    const int p = k_ + 2;
    const int ncell = (p + 1) * (p + 2) / 2;
    const int nedge = k_ + 2;
    // v0 in raw monomials of degree p from its nodal values.
    const auto nodes = lagrange_nodes(v_, p);
    Eigen::MatrixXd vand(ncell, ncell);
    for (int i = 0; i < ncell; ++i) vand.row(i) = mono(nodes[i], p).transpose();
    const Eigen::VectorXd v0 = vand.fullPivLu().solve(local.head(ncell));

    const int nm = (m_ + 1) * (m_ + 2) / 2;
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nm, nm);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nm);
    for (std::size_t q = 0; q < vol_pts_.size(); ++q) {
      const Eigen::VectorXd phi = mono(vol_pts_[q], m_);
      mass += vol_w_[q] * phi * phi.transpose();
      const Eigen::Vector2d g0(mono_dx(vol_pts_[q], p).dot(v0), mono_dy(vol_pts_[q], p).dot(v0));
      const Eigen::VectorXd gx = mono_dx(vol_pts_[q], m_), gy = mono_dy(vol_pts_[q], m_);
      rhs -= vol_w_[q] * (g0.x() * gx + g0.y() * gy);
    }
    for (int side = 0; side < 3; ++side) {
      const int ia = (side + 1) % 3, ib = (side + 2) % 3;
      const Point2 lo = ids_[ia] < ids_[ib] ? v_[ia] : v_[ib];
      const Point2 hi = ids_[ia] < ids_[ib] ? v_[ib] : v_[ia];
      const Vec2 d = hi - lo;
      const double len = d.norm();
      const Vec2 n_e(d.y() / len, -d.x() / len);
      const Vec2 ccw = v_[ib] - v_[ia];
      const Vec2 n_out = Vec2(ccw.y(), -ccw.x()).normalized();
      const double sigma = n_e.dot(n_out) > 0 ? 1.0 : -1.0;
      for (std::size_t q = 0; q < line_.size(); ++q) {
        const double t = line_.points[q](0);
        const Point2 x = lo + t * d;
        double vn = 0.0;
        for (int l = 0; l < nedge; ++l) vn += local(ncell + side * nedge + l) * legendre(l, t, len);
        rhs += line_.weights[q] * len * sigma * vn * mono(x, m_);
      }
    }
    const Eigen::VectorXd c = mass.fullPivLu().solve(rhs);
    std::vector<double> out;
    for (const auto& x : points) out.push_back(mono(x, m_).dot(c));
    return out;
  }

  const std::vector<Point2>& volume_points() const { return vol_pts_; }
  const std::vector<double>& volume_weights() const { return vol_w_; }

 private:
  static double legendre(int l, double t, double len) {
    const double s = 2 * t - 1;
    double p = 1.0;
    if (l == 1) p = s;
    if (l == 2) p = 0.5 * (3 * s * s - 1);
    if (l == 3) p = 0.5 * (5 * s * s * s - 3 * s);
    return std::sqrt((2 * l + 1) / len) * p;
  }

  Eigen::VectorXd mono(const Point2& x, int deg) const {
    const Vec2 r = (x - centre_) / scale_;
    Eigen::VectorXd out((deg + 1) * (deg + 2) / 2);
    int i = 0;
    for (int d = 0; d <= deg; ++d) {
      for (int b = 0; b <= d; ++b) out(i++) = std::pow(r.x(), d - b) * std::pow(r.y(), b);
    }
    return out;
  }

  Eigen::VectorXd mono_dx(const Point2& x, int deg) const {
    const Vec2 r = (x - centre_) / scale_;
    Eigen::VectorXd out((deg + 1) * (deg + 2) / 2);
    int i = 0;
    for (int d = 0; d <= deg; ++d) {
      for (int b = 0; b <= d; ++b) {
        const int a = d - b;
        out(i++) = a == 0 ? 0.0 : a * std::pow(r.x(), a - 1) * std::pow(r.y(), b) / scale_;
      }
    }
    return out;
  }

  Eigen::VectorXd mono_dy(const Point2& x, int deg) const {
    const Vec2 r = (x - centre_) / scale_;
    Eigen::VectorXd out((deg + 1) * (deg + 2) / 2);
    int i = 0;
    for (int d = 0; d <= deg; ++d) {
      for (int b = 0; b <= d; ++b) {
        out(i++) = b == 0 ? 0.0 : b * std::pow(r.x(), d - b) * std::pow(r.y(), b - 1) / scale_;
      }
    }
    return out;
  }

  int k_;
  int m_;
  std::array<Point2, 3> v_;
  std::array<int, 3> ids_;
  Point2 centre_;
  double scale_ = 0.0;
  std::vector<Point2> vol_pts_;
  std::vector<double> vol_w_;
  LineRule line_;
};

/// Relative L2(K) difference between the library lift of `local` and the
/// dense oracle.
inline double lift_oracle_error(const Mesh& mesh, const DofMap& dm, int tri, const Eigen::VectorXd& local, int degree) {
  const LocalWeakLap lift = local_weak_laplacian(mesh, dm, tri, degree);
  const DenseLift oracle(mesh, tri, dm.k, degree);
  const auto& pts = oracle.volume_points();
  const auto& w = oracle.volume_weights();
  const std::vector<double> ref = oracle.values(local, pts);
  const Eigen::VectorXd mine = eval(lift.basis, pts, 0).value * lift.apply(local);
  double diff = 0.0, norm = 0.0;
  for (std::size_t q = 0; q < pts.size(); ++q) {
    diff += w[q] * (mine(q) - ref[q]) * (mine(q) - ref[q]);
    norm += w[q] * ref[q] * ref[q];
  }
  return std::sqrt(diff / std::max(norm, 1e-300));
}

}  // namespace c0wg::testing
