#pragma once

// Polynomial bases on triangles and edges.
//
// Every element-local polynomial is stored as a coefficient matrix against
// centred, scaled monomials written in a frame attached to the element: the
// first axis runs along the longest side and is scaled by its length, the
// second is normal to it and scaled by the height onto that side. The frame
// keeps monomial Gram matrices well conditioned for thin elements, which the
// global x/y axes do not.
//
// The types are templates on the floating-point type; the unprefixed names
// are the double instantiations.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "c0wg/errors.hpp"
#include "c0wg/mesh.hpp"
#include "c0wg/quadrature.hpp"

namespace c0wg {

template <class Real>
using MatrixT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using VectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline int dim_p2(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Exponents (a, b) of all monomials of total degree <= `degree`, ordered by
/// degree, then by b.
inline std::vector<std::array<int, 2>> monomial_exponents(int degree) {
  std::vector<std::array<int, 2>> out;
  for (int d = 0; d <= degree; ++d) {
    for (int b = 0; b <= d; ++b) out.push_back({d - b, b});
  }
  return out;
}

/// Affine map xi = map * (x - centre).
template <class Real>
struct BasicLocalFrame {
  Point2T<Real> centre = Point2T<Real>::Zero();
  Eigen::Matrix<Real, 2, 2> map = Eigen::Matrix<Real, 2, 2>::Identity();

  Point2T<Real> to_local(const Point2T<Real>& p) const { return map * (p - centre); }

  static BasicLocalFrame for_triangle(const std::array<Point2T<Real>, 3>& v) {
    using std::abs;
    BasicLocalFrame f;
    f.centre = (v[0] + v[1] + v[2]) / Real(3);
    int longest = 0;
    Real hmax = 0;
    for (int i = 0; i < 3; ++i) {
      const Real len = (v[(i + 2) % 3] - v[(i + 1) % 3]).norm();
      if (len > hmax) {
        hmax = len;
        longest = i;
      }
    }
    const Point2T<Real> t = (v[(longest + 2) % 3] - v[(longest + 1) % 3]) / hmax;
    const Point2T<Real> s(-t.y(), t.x());
    const Real area2 = abs(detail::signed_area(v[0], v[1], v[2])) * 2;
    const Real height = area2 / hmax;
    f.map.row(0) = t.transpose() / hmax;
    f.map.row(1) = s.transpose() / height;
    return f;
  }
};

/// Values and physical derivatives of a family of functions at a list of
/// points. Row = point, column = function. Derivative blocks are filled up to
/// the requested order.
template <class Real>
struct BasicValueTable {
  int order = 0;
  MatrixT<Real> value;
  MatrixT<Real> dx, dy;
  MatrixT<Real> dxx, dxy, dyy;

  MatrixT<Real> laplacian() const { return dxx + dyy; }
};

/// Functions sum_j coeffs(i, j) * monomial_j(frame.to_local(x)).
template <class Real>
struct BasicLocalPolynomials {
  BasicLocalFrame<Real> frame;
  int degree = 0;
  MatrixT<Real> coeffs;

  int size() const { return static_cast<int>(coeffs.rows()); }
};

using LocalFrame = BasicLocalFrame<double>;
using ValueTable = BasicValueTable<double>;
using LocalPolynomials = BasicLocalPolynomials<double>;

/// Monomial table in frame coordinates, converted to physical derivatives.
template <class Real>
BasicValueTable<Real> eval_monomials(const BasicLocalFrame<Real>& frame, int degree,
                                     std::span<const Point2T<Real>> points, int deriv_order) {
  const auto exps = monomial_exponents(degree);
  const int np = static_cast<int>(points.size());
  const int nm = static_cast<int>(exps.size());
  BasicValueTable<Real> t;
  t.order = deriv_order;
  t.value.resize(np, nm);
  MatrixT<Real> d1, d2, d11, d12, d22;
  if (deriv_order >= 1) {
    d1.resize(np, nm);
    d2.resize(np, nm);
  }
  if (deriv_order >= 2) {
    d11.resize(np, nm);
    d12.resize(np, nm);
    d22.resize(np, nm);
  }
  std::vector<Real> px(degree + 1), py(degree + 1);
  const auto pw = [](const std::vector<Real>& p, int e) { return e < 0 ? Real(0) : p[e]; };
  for (int q = 0; q < np; ++q) {
    const Point2T<Real> xi = frame.to_local(points[q]);
    px[0] = py[0] = 1;
    for (int e = 1; e <= degree; ++e) {
      px[e] = px[e - 1] * xi.x();
      py[e] = py[e - 1] * xi.y();
    }
    for (int j = 0; j < nm; ++j) {
      const int a = exps[j][0], b = exps[j][1];
      t.value(q, j) = px[a] * py[b];
      if (deriv_order >= 1) {
        d1(q, j) = Real(a) * pw(px, a - 1) * py[b];
        d2(q, j) = Real(b) * px[a] * pw(py, b - 1);
      }
      if (deriv_order >= 2) {
        d11(q, j) = Real(a * (a - 1)) * pw(px, a - 2) * py[b];
        d12(q, j) = Real(a * b) * pw(px, a - 1) * pw(py, b - 1);
        d22(q, j) = Real(b * (b - 1)) * px[a] * pw(py, b - 2);
      }
    }
  }
  const auto& A = frame.map;
  if (deriv_order >= 1) {
    t.dx = A(0, 0) * d1 + A(1, 0) * d2;
    t.dy = A(0, 1) * d1 + A(1, 1) * d2;
  }
  if (deriv_order >= 2) {
    const auto hess = [&](int i, int j) -> MatrixT<Real> {
      return A(0, i) * A(0, j) * d11 + (A(0, i) * A(1, j) + A(1, i) * A(0, j)) * d12 + A(1, i) * A(1, j) * d22;
    };
    t.dxx = hess(0, 0);
    t.dxy = hess(0, 1);
    t.dyy = hess(1, 1);
  }
  return t;
}

template <class Real>
BasicValueTable<Real> eval(const BasicLocalPolynomials<Real>& poly, std::span<const Point2T<Real>> points,
                           int deriv_order) {
  if (deriv_order < 0 || deriv_order > 2) {
    throw Error(ErrorKind::capability, "triangle bases evaluate derivatives up to order 2");
  }
  const BasicValueTable<Real> m = eval_monomials(poly.frame, poly.degree, points, deriv_order);
  const MatrixT<Real> ct = poly.coeffs.transpose();
  BasicValueTable<Real> t;
  t.order = deriv_order;
  t.value = m.value * ct;
  if (deriv_order >= 1) {
    t.dx = m.dx * ct;
    t.dy = m.dy * ct;
  }
  if (deriv_order >= 2) {
    t.dxx = m.dxx * ct;
    t.dxy = m.dxy * ct;
    t.dyy = m.dyy * ct;
  }
  return t;
}

template <class Real>
BasicValueTable<Real> eval(const BasicLocalPolynomials<Real>& poly, const std::vector<Point2T<Real>>& points,
                           int deriv_order) {
  return eval(poly, std::span<const Point2T<Real>>(points), deriv_order);
}

/// Reference-to-physical map of a quadrature rule on a triangle.
template <class Real>
struct BasicPhysicalRule {
  std::vector<Point2T<Real>> points;
  std::vector<Real> weights;
};

using PhysicalRule = BasicPhysicalRule<double>;

template <class Real>
BasicPhysicalRule<Real> map_rule(const QuadratureRule<2, Real>& rule, const std::array<Point2T<Real>, 3>& v) {
  using std::abs;
  const Real jac = 2 * abs(detail::signed_area(v[0], v[1], v[2]));
  BasicPhysicalRule<Real> out;
  out.points.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& r = rule.points[q];
    out.points.push_back(v[0] + r.x() * (v[1] - v[0]) + r.y() * (v[2] - v[0]));
    out.weights.push_back(rule.weights[q] * jac);
  }
  return out;
}

/// L2(K)-orthonormal basis of P_m(K).
template <class Real>
struct BasicTriBasis {
  int element = -1;
  int degree = 0;
  BasicLocalPolynomials<Real> poly;

  int dim() const { return poly.size(); }
};

using TriBasis = BasicTriBasis<double>;

/// Orthonormalise the frame monomials of degree <= m on the triangle with
/// corners `v` (Cholesky form of Gram-Schmidt, with one reorthogonalisation
/// pass).
template <class Real>
BasicLocalPolynomials<Real> orthonormal_polynomials(const std::array<Point2T<Real>, 3>& v, int m) {
  using std::abs, std::sqrt;
  if (m < 0) throw Error(ErrorKind::capability, "negative polynomial degree");
  const Real area = abs(detail::signed_area(v[0], v[1], v[2]));
  Real hmax = 0;
  for (int i = 0; i < 3; ++i) hmax = std::max(hmax, Real((v[(i + 1) % 3] - v[i]).norm()));
  if (!(area > Real(1e-14) * hmax * hmax)) {
    throw Error(ErrorKind::conditioning, "degenerate triangle");
  }
  BasicLocalPolynomials<Real> poly;
  poly.frame = BasicLocalFrame<Real>::for_triangle(v);
  poly.degree = m;
  const BasicPhysicalRule<Real> rule = map_rule(triangle_quadrature<Real>(2 * m), v);
  const MatrixT<Real> M = eval_monomials(poly.frame, m, std::span<const Point2T<Real>>(rule.points), 0).value;
  const VectorT<Real> w = Eigen::Map<const VectorT<Real>>(rule.weights.data(), rule.weights.size());
  const int n = dim_p2(m);
  MatrixT<Real> coeffs = MatrixT<Real>::Identity(n, n);
  for (int pass = 0; pass < 2; ++pass) {
    const MatrixT<Real> vals = M * coeffs.transpose();
    const MatrixT<Real> gram = vals.transpose() * w.asDiagonal() * vals;
    Eigen::LLT<MatrixT<Real>> llt(gram);
    const Real scale = gram.diagonal().maxCoeff();
    if (llt.info() != Eigen::Success || !(scale > Real(0)) ||
        llt.matrixL().toDenseMatrix().diagonal().minCoeff() < Real(1e-7) * sqrt(scale)) {
      throw Error(ErrorKind::conditioning, "monomial Gram matrix is numerically singular");
    }
    const MatrixT<Real> linv = llt.matrixL().solve(MatrixT<Real>::Identity(n, n));
    coeffs = linv * coeffs;
  }
  poly.coeffs = coeffs;
  return poly;
}

template <class Real = double>
BasicTriBasis<Real> build_tri_basis(const Mesh& mesh, int element, int m) {
  BasicTriBasis<Real> b;
  b.element = element;
  b.degree = m;
  b.poly = orthonormal_polynomials(mesh.corners_as<Real>(element), m);
  return b;
}

template <class Real>
BasicValueTable<Real> eval(const BasicTriBasis<Real>& basis, std::span<const Point2T<Real>> points, int deriv_order) {
  return eval(basis.poly, points, deriv_order);
}

template <class Real>
BasicValueTable<Real> eval(const BasicTriBasis<Real>& basis, const std::vector<Point2T<Real>>& points,
                           int deriv_order) {
  return eval(basis.poly, std::span<const Point2T<Real>>(points), deriv_order);
}

/// L2(e)-orthonormal basis of P_m(e): scaled Legendre polynomials in the
/// parameter t in [0,1] running from `origin` along `tangent`.
template <class Real>
struct BasicEdgeBasis {
  int edge = -1;
  int degree = 0;
  Point2T<Real> origin = Point2T<Real>::Zero();
  Point2T<Real> tangent = Point2T<Real>::Zero();
  Real length = 0;

  int dim() const { return degree + 1; }

  Real parameter(const Point2T<Real>& p) const { return (p - origin).dot(tangent) / length; }
  Point2T<Real> point(Real t) const { return origin + (t * length) * tangent; }
};

using EdgeBasis = BasicEdgeBasis<double>;

/// Basis on the segment from `a` to `b`.
template <class Real>
BasicEdgeBasis<Real> segment_basis(const Point2T<Real>& a, const Point2T<Real>& b, int m) {
  if (m < 0) throw Error(ErrorKind::capability, "negative polynomial degree");
  BasicEdgeBasis<Real> eb;
  eb.degree = m;
  eb.origin = a;
  const Point2T<Real> d = b - a;
  eb.length = d.norm();
  eb.tangent = d / eb.length;
  return eb;
}

/// Basis on mesh edge `edge`, parameterised from the lower to the higher
/// vertex id.
template <class Real = double>
BasicEdgeBasis<Real> build_edge_basis(const Mesh& mesh, int edge, int m) {
  const auto& e = mesh.edges[edge];
  BasicEdgeBasis<Real> b = segment_basis<Real>(mesh.vertices[e.vertex_ids[0]].cast<Real>(),
                                               mesh.vertices[e.vertex_ids[1]].cast<Real>(), m);
  b.edge = edge;
  return b;
}

/// Values (order 0) or arclength derivatives (order 1) at edge parameters.
/// Row = point, column = basis function.
template <class Real>
MatrixT<Real> eval(const BasicEdgeBasis<Real>& basis, std::span<const Real> params, int deriv_order) {
  using std::sqrt;
  if (deriv_order < 0 || deriv_order > 1) {
    throw Error(ErrorKind::capability, "edge bases evaluate derivatives up to order 1");
  }
  const int np = static_cast<int>(params.size());
  const int nb = basis.dim();
  MatrixT<Real> out(np, nb);
  for (int q = 0; q < np; ++q) {
    const Real s = 2 * params[q] - 1;
    Real p_prev = 0, p = 1, d_prev = 0, d = 0;
    for (int l = 0; l < nb; ++l) {
      const Real norm = sqrt(Real(2 * l + 1) / basis.length);
      out(q, l) = norm * (deriv_order == 0 ? p : d * 2 / basis.length);
      // Bonnet recursion for P_{l+1} and its derivative.
      const Real p_next = (Real(2 * l + 1) * s * p - Real(l) * p_prev) / Real(l + 1);
      const Real d_next = d_prev + Real(2 * l + 1) * p;
      p_prev = p;
      p = p_next;
      d_prev = d;
      d = d_next;
    }
  }
  return out;
}

template <class Real>
MatrixT<Real> eval(const BasicEdgeBasis<Real>& basis, const std::vector<Real>& params, int deriv_order) {
  return eval(basis, std::span<const Real>(params), deriv_order);
}

template <class Real, std::size_t N>
MatrixT<Real> eval(const BasicEdgeBasis<Real>& basis, const std::array<Real, N>& params, int deriv_order) {
  return eval(basis, std::span<const Real>(params), deriv_order);
}

}  // namespace c0wg
