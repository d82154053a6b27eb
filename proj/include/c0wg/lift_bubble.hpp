#pragma once

// Edge-bubble construction used to certify the lower bound of the norm
// equivalence. For side i of K (opposite vertex i) it finds
//
//   phi_i = lambda_{i+1} lambda_{i+2} q,   q in P_{k+1}(K),
//
// with <phi_i, tau>_{e_i} = <g_i, tau>_{e_i} for tau in P_{k+1}(e_i) and
// (phi_i, tau)_K = 0 for tau in P_k(K). The system is square, of size
// (k+2)(k+3)/2. The solver never uses this; tests do.

#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "c0wg/errors.hpp"
#include "c0wg/polybasis.hpp"
#include "c0wg/quadrature.hpp"

namespace c0wg {

struct LocalLiftProblem {
  int side = 0;
  /// Data on the side, as coefficients in the side's orthonormal basis.
  Eigen::VectorXd g;
  /// Coefficients of q in the orthonormal P_{k+1}(K) basis.
  Eigen::VectorXd q;
  /// phi_i in the orthonormal P_{k+3}(K) basis.
  Eigen::VectorXd phi;
  double residual = 0.0;
};

struct EdgeBubbles {
  int k = 0;
  std::array<Point2, 3> corners;
  TriBasis basis;  // orthonormal P_{k+3}(K)
  std::array<LocalLiftProblem, 3> parts;
  Eigen::VectorXd phi;  // sum of the three parts
  double max_residual = 0.0;
};

/// Orthonormal basis on side i of the triangle, parameterised from vertex
/// (i+1)%3 to vertex (i+2)%3.
inline EdgeBasis side_basis(const std::array<Point2, 3>& v, int side, int degree) {
  return segment_basis<double>(v[(side + 1) % 3], v[(side + 2) % 3], degree);
}

inline Eigen::Vector3d barycentric(const std::array<Point2, 3>& v, const Point2& p) {
  const double area = detail::signed_area(v[0], v[1], v[2]);
  return {detail::signed_area(p, v[1], v[2]) / area, detail::signed_area(v[0], p, v[2]) / area,
          detail::signed_area(v[0], v[1], p) / area};
}

inline EdgeBubbles construct_edge_bubbles(const std::array<Point2, 3>& v, int k,
                                          const std::array<Eigen::VectorXd, 3>& g) {
  EdgeBubbles out;
  out.k = k;
  out.corners = v;
  out.basis.degree = k + 3;
  out.basis.poly = orthonormal_polynomials(v, k + 3);
  const LocalPolynomials qbasis = orthonormal_polynomials(v, k + 1);
  const LocalPolynomials test = orthonormal_polynomials(v, k);

  const PhysicalRule vol = map_rule(triangle_quadrature(2 * k + 8), v);
  const LineRule line = edge_quadrature(k + 5);
  const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(vol.weights.data(), vol.weights.size());
  const Eigen::MatrixXd q_vol = eval(qbasis, vol.points, 0).value;
  const Eigen::MatrixXd t_vol = eval(test, vol.points, 0).value;
  const Eigen::MatrixXd phi_vol = eval(out.basis.poly, vol.points, 0).value;

  const int nq = qbasis.size();
  const int ne = k + 2;
  const int nt = test.size();
  if (ne + nt != nq) throw Error(ErrorKind::invariant, "edge bubble system is not square");

  out.phi = Eigen::VectorXd::Zero(out.basis.dim());
  for (int i = 0; i < 3; ++i) {
    if (g[i].size() != ne) throw Error(ErrorKind::dimension, "edge data must have k+2 coefficients");
    const int a = (i + 1) % 3, b = (i + 2) % 3;
    const auto bubble = [&](const Point2& p) {
      const Eigen::Vector3d lam = barycentric(v, p);
      return lam(a) * lam(b);
    };

    const EdgeBasis eb = side_basis(v, i, k + 1);
    std::vector<double> params;
    std::vector<Point2> pts;
    std::vector<double> we;
    for (std::size_t q = 0; q < line.size(); ++q) {
      params.push_back(line.points[q](0));
      pts.push_back(eb.point(line.points[q](0)));
      we.push_back(line.weights[q] * eb.length);
    }
    const Eigen::MatrixXd chi = eval(eb, params, 0);
    Eigen::MatrixXd q_edge = eval(qbasis, pts, 0).value;
    for (int r = 0; r < q_edge.rows(); ++r) q_edge.row(r) *= bubble(pts[r]);
    Eigen::MatrixXd q_in = q_vol;
    for (int r = 0; r < q_in.rows(); ++r) q_in.row(r) *= bubble(vol.points[r]);

    const Eigen::VectorXd wev = Eigen::Map<const Eigen::VectorXd>(we.data(), we.size());
    Eigen::MatrixXd sys(nq, nq);
    sys.topRows(ne) = chi.transpose() * wev.asDiagonal() * q_edge;
    sys.bottomRows(nt) = t_vol.transpose() * wv.asDiagonal() * q_in;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nq);
    rhs.head(ne) = g[i];

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
      throw Error(ErrorKind::invariant, "edge bubble system is singular");
    }
    LocalLiftProblem& part = out.parts[i];
    part.side = i;
    part.g = g[i];
    part.q = lu.solve(rhs);
    // phi_i lies in P_{k+3}(K); its orthonormal coefficients are exact moments.
    part.phi = phi_vol.transpose() * wv.asDiagonal() * (q_in * part.q);

    // Residuals of both moment conditions, evaluated through the P_{k+3}
    // representation.
    const Eigen::MatrixXd phi_edge = eval(out.basis.poly, pts, 0).value;
    const Eigen::VectorXd edge_moments = chi.transpose() * wev.asDiagonal() * (phi_edge * part.phi);
    const Eigen::VectorXd vol_moments = t_vol.transpose() * wv.asDiagonal() * (phi_vol * part.phi);
    const double scale = std::max(1.0, g[i].cwiseAbs().maxCoeff());
    part.residual = std::max((edge_moments - g[i]).cwiseAbs().maxCoeff(), vol_moments.cwiseAbs().maxCoeff()) / scale;
    out.max_residual = std::max(out.max_residual, part.residual);
    out.phi += part.phi;
  }
  return out;
}

/// Same construction with edge data given as a function of (side, point); the
/// data is L2-projected onto P_{k+1} of each side first.
inline EdgeBubbles construct_edge_bubbles(const std::array<Point2, 3>& v, int k,
                                          const std::function<double(int, const Point2&)>& data) {
  const LineRule line = edge_quadrature(k + 5);
  std::array<Eigen::VectorXd, 3> g;
  for (int i = 0; i < 3; ++i) {
    const EdgeBasis eb = side_basis(v, i, k + 1);
    g[i] = Eigen::VectorXd::Zero(k + 2);
    for (std::size_t q = 0; q < line.size(); ++q) {
      const double t = line.points[q](0);
      const std::array<double, 1> tp{t};
      const Eigen::MatrixXd chi = eval(eb, tp, 0);
      g[i] += line.weights[q] * eb.length * data(i, eb.point(t)) * chi.row(0).transpose();
    }
  }
  return construct_edge_bubbles(v, k, g);
}

}  // namespace c0wg
