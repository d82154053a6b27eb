#include <random>
#include <set>

#include <gtest/gtest.h>

#include "c0wg/element.hpp"
#include "c0wg/space.hpp"
#include "support.hpp"

using namespace c0wg;

TEST(DofMap, TwoTriangleSquareK0) {
  const DofMap dm = build_dof_map(structured_unit_square(1), 0);
  EXPECT_EQ(dm.n_cell, 9);
  EXPECT_EQ(dm.n_total - dm.n_cell, 10);
  EXPECT_EQ(dm.n_total, 19);
}

TEST(DofMap, SingleTriangleK1) {
  const Mesh m = c0wg::testing::single_triangle(Point2(0, 0), Point2(1, 0), Point2(0, 1));
  const DofMap dm = build_dof_map(m, 1);
  EXPECT_EQ(dm.n_cell, 10);
  EXPECT_EQ(dm.n_total - dm.n_cell, 9);
  EXPECT_EQ(dm.n_total, 19);
}

TEST(DofMap, CountsDependOnlyOnTopology) {
  const Mesh a = structured_unit_square(3);
  Mesh b;
  const int nv = static_cast<int>(a.num_vertices());
  std::vector<int> perm(nv);
  for (int i = 0; i < nv; ++i) perm[i] = nv - 1 - i;
  b.vertices.resize(nv);
  for (int i = 0; i < nv; ++i) b.vertices[perm[i]] = a.vertices[i];
  for (const auto& t : a.triangles) {
    Triangle c;
    for (int j = 0; j < 3; ++j) c.vertex_ids[j] = perm[t.vertex_ids[j]];
    b.triangles.push_back(c);
  }
  b = build_edges(std::move(b));
  for (int k : {0, 1}) {
    const DofMap da = build_dof_map(a, k), db = build_dof_map(b, k);
    EXPECT_EQ(da.n_total, db.n_total);
    EXPECT_EQ(restrict_to_v0(da).size(), restrict_to_v0(db).size());
  }
}

TEST(DofMap, UnsupportedKIsCapabilityError) {
  for (int k : {-1, 2}) {
    try {
      build_dof_map(structured_unit_square(1), k);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::capability);
    }
  }
}

TEST(DofMap, NumberingIsABijection) {
  for (int k : {0, 1}) {
    const Mesh m = structured_unit_square(3);
    const DofMap dm = build_dof_map(m, k);
    std::vector<int> touched(dm.n_total, 0);
    for (int t = 0; t < dm.n_triangles; ++t) {
      const auto ids = dm.dofs(t);
      for (int i = 0; i < dm.local_size(); ++i) {
        ASSERT_GE(ids[i], 0);
        ASSERT_LT(ids[i], dm.n_total);
        ++touched[ids[i]];
        if (i < dm.cell_local) {
          EXPECT_LT(ids[i], dm.n_cell);
        } else {
          EXPECT_GE(ids[i], dm.n_cell);
        }
      }
    }
    for (int c : touched) EXPECT_GT(c, 0);
  }
}

TEST(DofMap, CellOnlyVariantForInteriorPenalty) {
  const DofMap dm = build_dof_map(structured_unit_square(2), 1, EdgeUnknowns::exclude);
  EXPECT_FALSE(dm.has_edge_dofs);
  EXPECT_EQ(dm.n_total, dm.n_cell);
  EXPECT_EQ(dm.local_size(), 10);
}

TEST(LagrangeNodes, LatticeCounts) {
  const Mesh m = structured_unit_square(1);
  EXPECT_EQ(lagrange_nodes(m, 0, 2).size(), 6u);
  const auto p3 = lagrange_nodes(m, 0, 3);
  EXPECT_EQ(p3.size(), 10u);
  const auto v = m.corners(0);
  // Two nodes on each side, at thirds.
  for (int side = 0; side < 3; ++side) {
    const Point2 a = v[(side + 1) % 3], b = v[(side + 2) % 3];
    EXPECT_NEAR((p3[3 + 2 * side] - (a + (b - a) / 3.0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((p3[4 + 2 * side] - (a + 2.0 * (b - a) / 3.0)).norm(), 0.0, 1e-15);
  }
}

TEST(LagrangeNodes, SharedSideNodesCoincide) {
  for (int k : {0, 1}) {
    const Mesh m = refine_uniform(structured_unit_square(2));
    const DofMap dm = build_dof_map(m, k);
    std::vector<Point2> where(dm.n_cell, Point2(NAN, NAN));
    for (int t = 0; t < dm.n_triangles; ++t) {
      const auto nodes = lagrange_nodes(m, t, dm.degree);
      const auto ids = dm.dofs(t);
      for (int i = 0; i < dm.cell_local; ++i) {
        if (std::isnan(where[ids[i]].x())) {
          where[ids[i]] = nodes[i];
        } else {
          EXPECT_LE((where[ids[i]] - nodes[i]).norm(), 1e-14);
        }
      }
    }
  }
}

TEST(RestrictToV0, TwoTriangleSquare) {
  const DofMap dm = build_dof_map(structured_unit_square(1), 0);
  const auto fixed = restrict_to_v0(dm);
  int cells = 0, edges = 0;
  for (int i : fixed) (i < dm.n_cell ? cells : edges)++;
  EXPECT_EQ(cells, 8);
  EXPECT_EQ(edges, 8);
  EXPECT_EQ(dm.n_total - static_cast<int>(fixed.size()), 3);
}

TEST(RestrictToV0, InteriorEdgeUnknownsStayFree) {
  const Mesh m = structured_unit_square(3);
  for (int k : {0, 1}) {
    const DofMap dm = build_dof_map(m, k);
    const auto fixed = restrict_to_v0(dm);
    const std::set<int> fs(fixed.begin(), fixed.end());
    for (int e = 0; e < dm.n_edges; ++e) {
      for (int l = 0; l < dm.edge_local; ++l) {
        EXPECT_EQ(fs.count(dm.edge_dof(e, l)) == 1, m.edges[e].is_boundary);
      }
    }
  }
}

TEST(RestrictToV0, FreeCountStaysPositiveUnderRefinement) {
  Mesh m = structured_unit_square(1);
  std::size_t prev = 0;
  for (int level = 0; level < 3; ++level) {
    const DofMap dm = build_dof_map(m, 0);
    const auto fixed = restrict_to_v0(dm);
    EXPECT_GT(fixed.size(), prev);
    EXPECT_GT(dm.n_total - static_cast<int>(fixed.size()), 0);
    prev = fixed.size();
    m = refine_uniform(m);
  }
}

TEST(Continuity, CellTracesAgreeAcrossSharedSides) {
  std::mt19937 rng(11);
  for (int k : {0, 1}) {
    const Mesh m = refine_uniform(structured_unit_square(2));
    const DofMap dm = build_dof_map(m, k);
    FieldVector v(dm);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < dm.n_total; ++i) v.values(i) = u(rng);
    const LineRule line = edge_quadrature(k + 5);
    for (int e = 0; e < dm.n_edges; ++e) {
      const auto& edge = m.edges[e];
      if (edge.is_boundary) continue;
      const EdgeBasis eb = build_edge_basis(m, e, 0);
      std::vector<Point2> pts;
      for (const auto& p : line.points) pts.push_back(eb.point(p(0)));
      Eigen::VectorXd vals[2];
      int i = 0;
      for (int t : {edge.left_tri, edge.right_tri}) {
        const Eigen::VectorXd c = v.local(dm, t).head(dm.cell_local);
        vals[i++] = eval(lagrange_basis(m.corners(t), dm.degree), pts, 0).value * c;
      }
      EXPECT_LE((vals[0] - vals[1]).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Continuity, EdgeUnknownIsSharedByBothNeighbours) {
  const Mesh m = structured_unit_square(2);
  const DofMap dm = build_dof_map(m, 1);
  for (int e = 0; e < dm.n_edges; ++e) {
    const auto& edge = m.edges[e];
    if (edge.is_boundary) continue;
    for (int t : {edge.left_tri, edge.right_tri}) {
      int side = 0;
      while (m.triangles[t].edge_ids[side] != e) ++side;
      const auto ids = dm.dofs(t);
      for (int l = 0; l < dm.edge_local; ++l) EXPECT_EQ(ids[dm.cell_local + side * dm.edge_local + l], dm.edge_dof(e, l));
    }
  }
}

TEST(FieldVector, LengthMismatchIsDimensionError) {
  const DofMap dm = build_dof_map(structured_unit_square(1), 0);
  try {
    FieldVector v(dm, Eigen::VectorXd::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}
