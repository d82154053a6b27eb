#pragma once

// Gauss rules on [0,1] and collapsed (Duffy) conical-product rules on the
// reference triangle {x >= 0, y >= 0, x + y <= 1}. Rules are generated in the
// requested floating-point type.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "c0wg/errors.hpp"

namespace c0wg {

template <int Dim, class Real = double>
struct QuadratureRule {
  using Point = Eigen::Matrix<Real, Dim, 1>;
  std::vector<Point> points;
  std::vector<Real> weights;
  int exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
};

using LineRule = QuadratureRule<1>;
using TriangleRule = QuadratureRule<2>;

namespace detail {

template <class Real>
struct GaussNodes {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// Gauss nodes for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1,1], alpha
/// and beta nonnegative integers. Golub-Welsch for the initial guess, then
/// Newton polishing on the three-term recurrence and Christoffel weights.
template <class Real = double>
GaussNodes<Real> gauss_jacobi(int n, int alpha, int beta) {
  using std::sqrt;
  const Real a = alpha, b = beta;
  std::vector<Real> diag(n), offsq(n + 1, Real(0));
  for (int j = 0; j < n; ++j) {
    const Real s = Real(2 * j) + a + b;
    diag[j] = (j == 0 && alpha + beta == 0) ? Real(0) : (b * b - a * a) / (s * (s + 2));
  }
  for (int j = 1; j <= n; ++j) {
    const Real s = Real(2 * j) + a + b;
    offsq[j] = Real(4) * j * (j + a) * (j + b) * (j + a + b) / (s * s * (s + 1) * (s - 1));
  }
  // mu0 = 2^(a+b+1) a! b! / (a+b+1)!
  Real mu0 = 1;
  for (int i = 0; i < alpha + beta + 1; ++i) mu0 *= 2;
  for (int i = 2; i <= alpha; ++i) mu0 *= i;
  for (int i = 2; i <= beta; ++i) mu0 *= i;
  for (int i = 2; i <= alpha + beta + 1; ++i) mu0 /= i;

  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  Mat jacobi = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    jacobi(j, j) = diag[j];
    if (j + 1 < n) jacobi(j, j + 1) = jacobi(j + 1, j) = sqrt(offsq[j + 1]);
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi);

  GaussNodes<Real> out;
  for (int i = 0; i < n; ++i) {
    Real x = eig.eigenvalues()(i);
    for (int iter = 0; iter < 3; ++iter) {
      Real p_prev = 0, p = 1, d_prev = 0, d = 0;
      for (int j = 0; j < n; ++j) {
        const Real p_next = (x - diag[j]) * p - offsq[j] * p_prev;
        const Real d_next = p + (x - diag[j]) * d - offsq[j] * d_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
      }
      if (d == Real(0)) break;
      x -= p / d;
    }
    Real q_prev = 0, q = Real(1) / sqrt(mu0), sum = q * q;
    for (int j = 0; j + 1 < n; ++j) {
      const Real q_next = ((x - diag[j]) * q - sqrt(offsq[j]) * q_prev) / sqrt(offsq[j + 1]);
      q_prev = q;
      q = q_next;
      sum += q * q;
    }
    out.nodes.push_back(x);
    out.weights.push_back(Real(1) / sum);
  }
  return out;
}

}  // namespace detail

/// Gauss-Legendre rule on [0,1], exact to degree 2*npoints - 1.
template <class Real = double>
QuadratureRule<1, Real> edge_quadrature(int npoints) {
  if (npoints < 1 || npoints > 16) {
    throw Error(ErrorKind::capability, "edge quadrature supports 1..16 points");
  }
  const auto g = detail::gauss_jacobi<Real>(npoints, 0, 0);
  QuadratureRule<1, Real> rule;
  rule.exactness_degree = 2 * npoints - 1;
  for (int i = 0; i < npoints; ++i) {
    using Point = typename QuadratureRule<1, Real>::Point;
    rule.points.push_back(Point((Real(1) + g.nodes[i]) / 2));
    rule.weights.push_back(g.weights[i] / 2);
  }
  return rule;
}

/// Rule on the reference triangle exact for total degree `degree`; weights sum
/// to 1/2. Uses Gauss-Jacobi(1,0) in the collapsed direction so the degree-1
/// rule is the centroid rule.
template <class Real = double>
QuadratureRule<2, Real> triangle_quadrature(int degree) {
  if (degree < 0 || degree > 20) {
    throw Error(ErrorKind::capability, "triangle quadrature supports degree 0..20");
  }
  const int n = degree / 2 + 1;
  const auto collapsed = detail::gauss_jacobi<Real>(n, 1, 0);
  const auto line = detail::gauss_jacobi<Real>(n, 0, 0);
  QuadratureRule<2, Real> rule;
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    const Real y = (Real(1) + collapsed.nodes[i]) / 2;
    const Real wy = collapsed.weights[i] / 4;
    for (int j = 0; j < n; ++j) {
      const Real s = (Real(1) + line.nodes[j]) / 2;
      rule.points.emplace_back(s * (Real(1) - y), y);
      rule.weights.push_back(wy * line.weights[j] / 2);
    }
  }
  return rule;
}

}  // namespace c0wg
