#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "c0wg/mesh.hpp"

using namespace c0wg;

namespace {

double min_angle(const Mesh& m) {
  double out = M_PI;
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
    const auto v = m.corners(t);
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = v[(i + 1) % 3] - v[i];
      const Vec2 b = v[(i + 2) % 3] - v[i];
      out = std::min(out, std::acos(a.dot(b) / (a.norm() * b.norm())));
    }
  }
  return out;
}

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) a += m.area(t);
  return a;
}

int euler(const Mesh& m) {
  return static_cast<int>(m.num_vertices()) - static_cast<int>(m.num_edges()) + static_cast<int>(m.num_triangles());
}

}  // namespace

TEST(StructuredSquare, CountsForSmallN) {
  const Mesh m1 = structured_unit_square(1);
  EXPECT_EQ(m1.num_triangles(), 2u);
  EXPECT_EQ(m1.num_vertices(), 4u);
  EXPECT_EQ(m1.num_edges(), 5u);
  const Mesh m2 = structured_unit_square(2);
  EXPECT_EQ(m2.num_triangles(), 8u);
  EXPECT_EQ(m2.num_vertices(), 9u);
  EXPECT_EQ(m2.num_edges(), 16u);
}

TEST(StructuredSquare, MeshSizeIsCellDiagonal) {
  EXPECT_NEAR(structured_unit_square(4).h, std::sqrt(2.0) / 4.0, 1e-15);
  EXPECT_NEAR(structured_unit_square(4).h, 0.35355, 1e-5);
}

TEST(StructuredSquare, AreaAndEuler) {
  for (int n : {1, 3, 8}) {
    const Mesh m = structured_unit_square(n);
    EXPECT_NEAR(total_area(m), 1.0, 1e-12);
    EXPECT_EQ(euler(m), 1);
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) EXPECT_GT(m.area(t), 0.0);
  }
}

TEST(StructuredSquare, DiameterIsLongestSide) {
  const Mesh m = structured_unit_square(3);
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
    double longest = 0.0;
    for (int e : m.triangles[t].edge_ids) longest = std::max(longest, m.edges[e].length);
    EXPECT_DOUBLE_EQ(m.triangles[t].diameter, longest);
  }
}

TEST(Refine, ChildCountsAndMeshSize) {
  const Mesh m1 = structured_unit_square(1);
  const Mesh r1 = refine_uniform(m1);
  EXPECT_EQ(r1.num_triangles(), 8u);
  EXPECT_NEAR(r1.h, m1.h / 2.0, 1e-15);
  const Mesh r2 = refine_uniform(refine_uniform(structured_unit_square(2)));
  EXPECT_EQ(r2.num_triangles(), 128u);
}

TEST(Refine, HalvesMeshSizeFromHalf) {
  Mesh m;
  m.vertices = {Point2(0, 0), Point2(0.5, 0), Point2(0, 0.3)};
  m.triangles.push_back(Triangle{{0, 1, 2}, {}, 0.0});
  m = build_edges(std::move(m));
  ASSERT_NEAR(m.h, 0.5 * std::sqrt(1.0 + 0.36), 1e-15);
  const double h0 = m.h;
  EXPECT_NEAR(refine_uniform(m).h, h0 / 2, 1e-15);
}

TEST(Refine, PreservesMinimumAngleAreaAndConformity) {
  Mesh m = structured_unit_square(3);
  const double angle = min_angle(m);
  for (int level = 0; level < 3; ++level) {
    m = refine_uniform(m);
    EXPECT_NEAR(min_angle(m), angle, 1e-12);
    EXPECT_NEAR(total_area(m), 1.0, 1e-12);
    EXPECT_EQ(euler(m), 1);
    for (const auto& e : m.edges) {
      if (e.is_boundary) {
        EXPECT_TRUE((e.left_tri == no_triangle) != (e.right_tri == no_triangle));
      } else {
        EXPECT_NE(e.left_tri, no_triangle);
        EXPECT_NE(e.right_tri, no_triangle);
      }
    }
  }
}

TEST(EdgeNormals, SingleTriangleBottomEdge) {
  Mesh m;
  m.vertices = {Point2(0, 0), Point2(1, 0), Point2(0, 1)};
  m.triangles.push_back(Triangle{{0, 1, 2}, {}, 0.0});
  m = build_edges(std::move(m));
  bool found = false;
  for (const auto& e : m.edges) {
    if (e.vertex_ids[0] == 0 && e.vertex_ids[1] == 1) {
      EXPECT_NEAR(e.normal.x(), 0.0, 1e-15);
      EXPECT_NEAR(e.normal.y(), -1.0, 1e-15);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(EdgeNormals, UnitOrthogonalAndFixedPerEdge) {
  const Mesh m = refine_uniform(structured_unit_square(3));
  for (const auto& e : m.edges) {
    const Vec2 d = m.vertices[e.vertex_ids[1]] - m.vertices[e.vertex_ids[0]];
    EXPECT_NEAR(e.normal.norm(), 1.0, 1e-14);
    EXPECT_NEAR(e.normal.dot(d), 0.0, 1e-14);
    EXPECT_LT(e.vertex_ids[0], e.vertex_ids[1]);
  }
}

TEST(EdgeNormals, OrientationSignsCancelOnInteriorEdges) {
  const Mesh m = refine_uniform(structured_unit_square(2));
  std::vector<double> sum(m.num_edges(), 0.0);
  std::vector<int> count(m.num_edges(), 0);
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
    for (int side = 0; side < 3; ++side) {
      const int e = m.triangles[t].edge_ids[side];
      sum[e] += m.sigma(t, side);
      ++count[e];
    }
  }
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    if (m.edges[e].is_boundary) {
      EXPECT_EQ(count[e], 1);
    } else {
      EXPECT_EQ(count[e], 2);
      EXPECT_EQ(sum[e], 0.0);
    }
  }
}

TEST(EdgeNormals, BoundarySignGivesOutwardNormalOfSquare) {
  const Mesh m = structured_unit_square(4);
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
    for (int side = 0; side < 3; ++side) {
      const auto& e = m.edges[m.triangles[t].edge_ids[side]];
      if (!e.is_boundary) continue;
      const Point2 mid = 0.5 * (m.vertices[e.vertex_ids[0]] + m.vertices[e.vertex_ids[1]]);
      Vec2 expected = Vec2::Zero();
      if (mid.x() < 1e-12) expected = Vec2(-1, 0);
      if (mid.x() > 1 - 1e-12) expected = Vec2(1, 0);
      if (mid.y() < 1e-12) expected = Vec2(0, -1);
      if (mid.y() > 1 - 1e-12) expected = Vec2(0, 1);
      EXPECT_NEAR((m.outward_normal(t, side) - expected).norm(), 0.0, 1e-14);
    }
  }
}

TEST(LoadMesh, RoundTripOfUnitSquare) {
  const Mesh ref = structured_unit_square(1);
  std::stringstream text;
  write_mesh(text, ref);
  const Mesh m = parse_mesh(text);
  ASSERT_EQ(m.num_vertices(), ref.num_vertices());
  ASSERT_EQ(m.num_triangles(), ref.num_triangles());
  ASSERT_EQ(m.num_edges(), ref.num_edges());
  for (std::size_t i = 0; i < m.num_vertices(); ++i) EXPECT_EQ(m.vertices[i], ref.vertices[i]);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    EXPECT_EQ(m.triangles[t].vertex_ids, ref.triangles[t].vertex_ids);
  }
  EXPECT_DOUBLE_EQ(m.h, ref.h);
}

TEST(LoadMesh, ClockwiseTrianglesAreReoriented) {
  std::istringstream text("3 1\n0 0\n1 0\n0 1\n0 2 1\n");
  const Mesh m = parse_mesh(text);
  EXPECT_GT(m.area(0), 0.0);
}

TEST(LoadMesh, RepeatedTriangleIsStructuralError) {
  std::istringstream text("4 3\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 1 2\n");
  try {
    parse_mesh(text);
    FAIL() << "expected a structural error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::structural);
  }
}

TEST(LoadMesh, VertexIndexOutOfRangeIsParseErrorWithLine) {
  std::istringstream text("4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 7\n");
  try {
    parse_mesh(text);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
  }
}

TEST(LoadMesh, MalformedInputsAreParseErrors) {
  for (const char* bad : {"", "3\n", "3 1\n0 0\n1 0\n", "3 1\n0 0\n1 x\n0 1\n0 1 2\n", "3 1\n0 0\n1 0\n0 1\n0 1\n"}) {
    std::istringstream text(bad);
    try {
      parse_mesh(text);
      FAIL() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::parse) << bad;
    }
  }
}

TEST(LoadMesh, MissingFileIsParseError) {
  try {
    load_mesh("/nonexistent/mesh.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
  }
}

TEST(MeshSpec, StructuredAndErrors) {
  EXPECT_EQ(mesh_from_spec("structured:3").num_triangles(), 18u);
  for (const char* bad : {"structured:", "structured:0", "structured:2x", "structured:-1"}) {
    try {
      mesh_from_spec(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::config) << bad;
    }
  }
}
