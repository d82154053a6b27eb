#pragma once

// Conforming triangulations of polygonal domains with a fixed unit normal per
// edge.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "c0wg/errors.hpp"

namespace c0wg {

using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

/// Points in another floating-point type (the element kernels also run in
/// long double).
template <class Real>
using Point2T = Eigen::Matrix<Real, 2, 1>;

inline constexpr int no_triangle = -1;

struct Triangle {
  /// Counter-clockwise vertex ids.
  std::array<int, 3> vertex_ids{};
  /// edge_ids[i] is the side opposite vertex i, i.e. from vertex (i+1)%3 to
  /// vertex (i+2)%3.
  std::array<int, 3> edge_ids{};
  double diameter = 0.0;
};

struct Edge {
  /// Sorted: vertex_ids[0] < vertex_ids[1].
  std::array<int, 2> vertex_ids{};
  Vec2 normal = Vec2::Zero();
  /// left_tri traverses the edge from the lower to the higher vertex id in
  /// its counter-clockwise order, so its outward normal equals `normal`.
  int left_tri = no_triangle;
  int right_tri = no_triangle;
  bool is_boundary = false;
  double length = 0.0;
};

struct Mesh {
  std::vector<Point2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  double h = 0.0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  std::size_t num_edges() const { return edges.size(); }

  std::array<Point2, 3> corners(int t) const {
    const auto& v = triangles[t].vertex_ids;
    return {vertices[v[0]], vertices[v[1]], vertices[v[2]]};
  }

  template <class Real>
  std::array<Point2T<Real>, 3> corners_as(int t) const {
    const auto& v = triangles[t].vertex_ids;
    return {vertices[v[0]].cast<Real>(), vertices[v[1]].cast<Real>(), vertices[v[2]].cast<Real>()};
  }

  double area(int t) const {
    const auto p = corners(t);
    const Vec2 a = p[1] - p[0];
    const Vec2 b = p[2] - p[0];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }

  /// Orientation sign n_e . n_outward(K) of local side i of triangle t.
  double sigma(int t, int local_edge) const {
    const auto& v = triangles[t].vertex_ids;
    return v[(local_edge + 1) % 3] < v[(local_edge + 2) % 3] ? 1.0 : -1.0;
  }

  Vec2 outward_normal(int t, int local_edge) const {
    return sigma(t, local_edge) * edges[triangles[t].edge_ids[local_edge]].normal;
  }
};

namespace detail {

template <class Real>
Real signed_area(const Point2T<Real>& a, const Point2T<Real>& b, const Point2T<Real>& c) {
  return ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x())) / 2;
}

}  // namespace detail

/// Fill the edge table, the fixed edge normals and the triangle diameters.
///
/// The normal of an edge is the clockwise quarter turn of the unit vector from
/// its lower-index vertex to its higher-index vertex. Throws a structural error
/// when a side is shared by more than two triangles, when two triangles lie on
/// the same side of an edge, or when a triangle is degenerate.
inline Mesh build_edges(Mesh m) {
  const int nv = static_cast<int>(m.vertices.size());
  m.edges.clear();
  std::map<std::pair<int, int>, int> lookup;
  std::vector<char> referenced(nv, 0);

  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    auto& tri = m.triangles[t];
    for (int id : tri.vertex_ids) {
      if (id < 0 || id >= nv) {
        throw Error(ErrorKind::structural,
                    "triangle " + std::to_string(t) + " references vertex " + std::to_string(id));
      }
      referenced[id] = 1;
    }
    const auto& v = tri.vertex_ids;
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) {
      throw Error(ErrorKind::structural, "triangle " + std::to_string(t) + " repeats a vertex");
    }
    if (m.area(t) <= 0.0) {
      throw Error(ErrorKind::structural,
                  "triangle " + std::to_string(t) + " is degenerate or clockwise");
    }
    double diameter = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int a = v[(i + 1) % 3];
      const int b = v[(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second}, 0);
      if (inserted) {
        it->second = static_cast<int>(m.edges.size());
        Edge e;
        e.vertex_ids = {key.first, key.second};
        const Vec2 d = m.vertices[key.second] - m.vertices[key.first];
        e.length = d.norm();
        e.normal = Vec2(d.y(), -d.x()) / e.length;
        m.edges.push_back(e);
      }
      Edge& e = m.edges[it->second];
      int& slot = a < b ? e.left_tri : e.right_tri;
      if (slot != no_triangle) {
        throw Error(ErrorKind::structural,
                    "side (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                        ") is claimed twice from the same side");
      }
      slot = t;
      tri.edge_ids[i] = it->second;
      diameter = std::max(diameter, e.length);
    }
    tri.diameter = diameter;
  }

  for (int i = 0; i < nv; ++i) {
    if (!referenced[i]) {
      throw Error(ErrorKind::structural, "vertex " + std::to_string(i) + " is not used");
    }
  }

  m.h = 0.0;
  for (const auto& tri : m.triangles) m.h = std::max(m.h, tri.diameter);
  for (auto& e : m.edges) e.is_boundary = e.left_tri == no_triangle || e.right_tri == no_triangle;
  return m;
}

/// Unit square split into n x n cells, each cut by one diagonal whose direction
/// alternates in a checkerboard pattern. 2n^2 triangles, h = sqrt(2)/n.
inline Mesh structured_unit_square(int n) {
  if (n < 1) throw Error(ErrorKind::config, "structured mesh needs n >= 1");
  Mesh m;
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      m.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      Triangle t1, t2;
      if ((i + j) % 2 == 0) {
        t1.vertex_ids = {a, b, c};
        t2.vertex_ids = {a, c, d};
      } else {
        t1.vertex_ids = {a, b, d};
        t2.vertex_ids = {b, c, d};
      }
      m.triangles.push_back(t1);
      m.triangles.push_back(t2);
    }
  }
  return build_edges(std::move(m));
}

/// Red refinement: every triangle is split into four congruent children
/// through its edge midpoints.
inline Mesh refine_uniform(const Mesh& coarse) {
  Mesh fine;
  fine.vertices = coarse.vertices;
  const int nv = static_cast<int>(coarse.vertices.size());
  for (const auto& e : coarse.edges) {
    fine.vertices.push_back(0.5 * (coarse.vertices[e.vertex_ids[0]] + coarse.vertices[e.vertex_ids[1]]));
  }
  fine.triangles.reserve(4 * coarse.triangles.size());
  for (const auto& t : coarse.triangles) {
    const auto& v = t.vertex_ids;
    const int m0 = nv + t.edge_ids[0];
    const int m1 = nv + t.edge_ids[1];
    const int m2 = nv + t.edge_ids[2];
    for (const std::array<int, 3> child :
         {std::array<int, 3>{v[0], m2, m1}, std::array<int, 3>{m2, v[1], m0},
          std::array<int, 3>{m1, m0, v[2]}, std::array<int, 3>{m0, m1, m2}}) {
      Triangle c;
      c.vertex_ids = child;
      fine.triangles.push_back(c);
    }
  }
  return build_edges(std::move(fine));
}

/// Parse the `V T` / `x y` / `i j k` text format. Clockwise triangles are
/// reoriented; blank lines and lines starting with '#' are skipped.
inline Mesh parse_mesh(std::istream& in) {
  std::vector<std::pair<int, std::string>> lines;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos || raw[first] == '#') continue;
    lines.emplace_back(lineno, raw);
  }
  const auto fail = [](int line, const std::string& what) -> Error {
    return Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
  };
  if (lines.empty()) throw Error(ErrorKind::parse, "empty mesh file");

  long nv = -1, nt = -1;
  {
    std::istringstream header(lines[0].second);
    std::string extra;
    if (!(header >> nv >> nt) || (header >> extra) || nv < 3 || nt < 1) {
      throw fail(lines[0].first, "expected header 'V T' with V >= 3 and T >= 1");
    }
  }
  if (static_cast<long>(lines.size()) != 1 + nv + nt) {
    const int last = lines.back().first;
    throw fail(last, "expected " + std::to_string(nv) + " vertex lines and " +
                         std::to_string(nt) + " triangle lines, found " +
                         std::to_string(lines.size() - 1) + " data lines");
  }

  Mesh m;
  for (long i = 0; i < nv; ++i) {
    const auto& [ln, text] = lines[1 + i];
    std::istringstream row(text);
    double x = 0, y = 0;
    std::string extra;
    if (!(row >> x >> y) || (row >> extra)) throw fail(ln, "expected 'x y'");
    if (!std::isfinite(x) || !std::isfinite(y)) throw fail(ln, "non-finite coordinate");
    m.vertices.emplace_back(x, y);
  }
  for (long i = 0; i < nt; ++i) {
    const auto& [ln, text] = lines[1 + nv + i];
    std::istringstream row(text);
    long a = 0, b = 0, c = 0;
    std::string extra;
    if (!(row >> a >> b >> c) || (row >> extra)) throw fail(ln, "expected 'i j k'");
    for (long id : {a, b, c}) {
      if (id < 0 || id >= nv) throw fail(ln, "vertex index " + std::to_string(id) + " out of range");
    }
    Triangle t;
    t.vertex_ids = {static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
    if (detail::signed_area(m.vertices[a], m.vertices[b], m.vertices[c]) < 0.0) {
      std::swap(t.vertex_ids[1], t.vertex_ids[2]);
    }
    m.triangles.push_back(t);
  }
  return build_edges(std::move(m));
}

inline Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open mesh file '" + path + "'");
  return parse_mesh(in);
}

inline void write_mesh(std::ostream& out, const Mesh& m) {
  out.precision(17);
  out << m.vertices.size() << ' ' << m.triangles.size() << '\n';
  for (const auto& p : m.vertices) out << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : m.triangles) {
    out << t.vertex_ids[0] << ' ' << t.vertex_ids[1] << ' ' << t.vertex_ids[2] << '\n';
  }
}

/// `structured:<n>` or a path to a mesh file.
inline Mesh mesh_from_spec(const std::string& spec) {
  constexpr std::string_view prefix = "structured:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string count = spec.substr(prefix.size());
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != count.size() || n < 1) {
      throw Error(ErrorKind::config, "bad structured mesh spec '" + spec + "'");
    }
    return structured_unit_square(n);
  }
  return load_mesh(spec);
}

}  // namespace c0wg
