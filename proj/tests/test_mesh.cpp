#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"

using namespace dgc;

namespace {

MeshPtr unit_square(int n, BoundaryLabel bottom = BoundaryLabel::Contact)
{
  return build_rectangle_mesh(Vec2(0, 0), Vec2(1, 1), n,
                              side_labeler(Vec2(0, 0), Vec2(1, 1), BoundaryLabel::Dirichlet, BoundaryLabel::Traction,
                                           bottom, BoundaryLabel::Traction));
}

/// Exhaustive conformity scan: every edge is shared by at most two triangles
/// with opposite orientation, boundary edges lie on the domain boundary, and
/// no vertex lies in the interior of another triangle's edge.
void expect_conforming(const Mesh& m, double domain_area)
{
  std::map<std::pair<int, int>, int> directed;
  double area = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    EXPECT_GT(m.signed_area(t), 0.0) << "triangle " << t;
    area += m.area(t);
    const auto& tri = m.triangle(t);
    for (int k = 0; k < 3; ++k) ++directed[{tri[k], tri[(k + 1) % 3]}];
  }
  EXPECT_NEAR(area, domain_area, 1e-12 * domain_area);
  for (const auto& [edge, count] : directed) {
    EXPECT_EQ(count, 1);
    if (!directed.count({edge.second, edge.first})) {
      const Vec2 mid = 0.5 * (m.vertex(edge.first) + m.vertex(edge.second));
      const bool on_boundary = std::abs(mid.x()) < 1e-12 || std::abs(mid.x() - 1.0) < 1e-12 ||
                               std::abs(mid.y()) < 1e-12 || std::abs(mid.y() - 1.0) < 1e-12;
      EXPECT_TRUE(on_boundary) << "hanging edge " << edge.first << "-" << edge.second;
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 a = m.vertex(m.edge(e).vertices[0]), b = m.vertex(m.edge(e).vertices[1]);
    for (int v = 0; v < m.num_vertices(); ++v) {
      if (v == m.edge(e).vertices[0] || v == m.edge(e).vertices[1]) continue;
      const Vec2 p = m.vertex(v);
      const double s = (p - a).dot(b - a) / (b - a).squaredNorm();
      if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
      EXPECT_GT((a + s * (b - a) - p).norm(), 1e-12) << "vertex " << v << " hangs on edge " << e;
    }
  }
}

}  // namespace

TEST(Mesh, RectangleCountsAndLabels)
{
  auto m = unit_square(2);
  EXPECT_EQ(m->num_triangles(), 8);
  EXPECT_EQ(m->num_vertices(), 9);
  EXPECT_EQ(m->num_edges(), 16);
  EXPECT_EQ(m->edges_with_label(BoundaryLabel::Contact).size(), 2u);
  EXPECT_EQ(m->edges_with_label(BoundaryLabel::Dirichlet).size(), 2u);
  EXPECT_EQ(m->edges_with_label(BoundaryLabel::Traction).size(), 4u);
  EXPECT_EQ(m->interior_edges().size(), 8u);
  expect_conforming(*m, 1.0);
}

TEST(Mesh, OutwardNormalsPointOutside)
{
  auto m = unit_square(3);
  for (int e = 0; e < m->num_edges(); ++e) {
    if (!m->is_boundary_edge(e)) continue;
    EXPECT_NEAR((m->outward_normal(e) - oracle::boundary_normal(*m, e)).norm(), 0.0, 1e-14);
  }
}

TEST(Mesh, UnlabeledBoundaryIsRejected)
{
  std::vector<Vec2> v{{0, 0}, {1, 0}, {0, 1}};
  std::map<VertexPair, BoundaryLabel> labels{{ordered_pair(0, 1), BoundaryLabel::Dirichlet}};
  EXPECT_THROW(Mesh(v, {{0, 1, 2}}, labels), MeshError);
}

TEST(Mesh, ClockwiseTriangleIsRejected)
{
  std::vector<Vec2> v{{0, 0}, {1, 0}, {0, 1}};
  std::map<VertexPair, BoundaryLabel> labels{{ordered_pair(0, 1), BoundaryLabel::Dirichlet},
                                             {ordered_pair(1, 2), BoundaryLabel::Traction},
                                             {ordered_pair(0, 2), BoundaryLabel::Traction}};
  EXPECT_THROW(Mesh(v, {{0, 2, 1}}, labels), MeshError);
}

TEST(Refine, TwoTriangleSquareMarkBoth)
{
  auto m = unit_square(1);
  ASSERT_EQ(m->num_triangles(), 2);
  auto fine = refine_nvb(m, MarkSet{{0, 1}});
  EXPECT_EQ(fine->num_triangles(), 4);
  expect_conforming(*fine, 1.0);
}

TEST(Refine, EmptyMarkingIsIdentity)
{
  auto m = unit_square(2);
  auto same = refine_nvb(m, MarkSet{});
  ASSERT_EQ(same->num_triangles(), m->num_triangles());
  for (int t = 0; t < m->num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) EXPECT_EQ(same->vertex(same->triangle(t)[k]), m->vertex(m->triangle(t)[k]));
  }
}

TEST(Refine, RandomMarkingsStayConformingAndNested)
{
  std::mt19937 rng(7);
  auto m = unit_square(2);
  for (int step = 0; step < 12; ++step) {
    MarkSet marked;
    std::bernoulli_distribution coin(0.2);
    for (int t = 0; t < m->num_triangles(); ++t) {
      if (coin(rng)) marked.triangles.push_back(t);
    }
    if (marked.empty()) marked.triangles.push_back(0);
    auto fine = refine_nvb(m, marked);
    expect_conforming(*fine, 1.0);

    // Marked triangles were bisected; children tile their parents.
    std::vector<double> child_area(m->num_triangles(), 0.0);
    std::vector<int> children(m->num_triangles(), 0);
    for (int t = 0; t < fine->num_triangles(); ++t) {
      ASSERT_GE(fine->parent(t), 0);
      child_area[fine->parent(t)] += fine->area(t);
      ++children[fine->parent(t)];
    }
    for (int t = 0; t < m->num_triangles(); ++t) {
      EXPECT_NEAR(child_area[t], m->area(t), 1e-12 * m->area(t));
      if (marked.contains(t)) {
        EXPECT_GE(children[t], 2);
      }
    }
    // Sub-edges inherit the label of the straight side they lie on.
    for (int e = 0; e < fine->num_edges(); ++e) {
      if (!fine->is_boundary_edge(e)) continue;
      const Vec2 mid = fine->edge_midpoint(e);
      const BoundaryLabel expected = std::abs(mid.x()) < 1e-12   ? BoundaryLabel::Dirichlet
                                     : std::abs(mid.y()) < 1e-12 ? BoundaryLabel::Contact
                                                                 : BoundaryLabel::Traction;
      EXPECT_EQ(*fine->edge(e).label, expected);
    }
    m = fine;
  }
}

TEST(Refine, UniformRefinementAreasAndGenerations)
{
  auto m = unit_square(2);
  auto fine = refine_nvb(m, MarkSet::all(*m));
  EXPECT_EQ(fine->num_triangles(), 2 * m->num_triangles());
  for (int t = 0; t < fine->num_triangles(); ++t) EXPECT_EQ(fine->generation(t), 1);
  auto twice = refine_uniform(m, 2);
  EXPECT_EQ(twice->num_triangles(), 4 * m->num_triangles());
  EXPECT_NEAR(shortest_edge(*twice), 0.25, 1e-14);
}

TEST(Refine, MinimumAngleBoundedOverTwentyGenerations)
{
  auto m = unit_square(1);
  const double level0 = min_angle(*refine_nvb(m, MarkSet::all(*m)));
  for (int gen = 0; gen < 20; ++gen) {
    // A few uniform sweeps, then grading toward the corner at the origin.
    MarkSet marked;
    for (int t = 0; t < m->num_triangles(); ++t) {
      if (gen < 4 || m->centroid(t).norm() < 3.0 * m->diameter(t)) marked.triangles.push_back(t);
    }
    if (marked.empty()) marked.triangles.push_back(0);
    m = refine_nvb(m, marked);
    EXPECT_GE(min_angle(*m), level0 - 1e-12) << "generation " << gen;
  }
}

TEST(Dorfler, WorkedExample)
{
  auto marked = dorfler_mark({4, 3, 2, 1}, 0.3);
  EXPECT_EQ(marked.triangles, std::vector<int>({0}));
}

TEST(Dorfler, FullBulkMarksEveryPositive)
{
  auto marked = dorfler_mark({0.5, 0.0, 2.0, 1.0}, 1.0);
  EXPECT_EQ(marked.triangles, std::vector<int>({0, 2, 3}));
}

TEST(Dorfler, SinglePositiveIndicator)
{
  for (double theta : {0.01, 0.3, 1.0}) {
    EXPECT_EQ(dorfler_mark({0, 0, 5, 0}, theta).triangles, std::vector<int>({2}));
  }
}

TEST(Dorfler, TiesGoToLowerIndex)
{
  EXPECT_EQ(dorfler_mark({1, 2, 2, 2}, 0.5).triangles, std::vector<int>({1, 2}));
}

TEST(Dorfler, Errors)
{
  EXPECT_THROW(dorfler_mark({0, 0}, 0.3), Error);
  EXPECT_THROW(dorfler_mark({1, -1}, 0.3), Error);
  EXPECT_THROW(dorfler_mark({1, 1}, 0.0), ConfigError);
  EXPECT_THROW(dorfler_mark({1, 1}, 1.5), ConfigError);
}

TEST(Dorfler, MatchesBruteForce)
{
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 12;
    std::vector<double> eta(n);
    std::uniform_int_distribution<int> grid(0, 6);
    std::uniform_real_distribution<double> real(0.0, 1.0);
    for (auto& e : eta) e = trial % 2 ? grid(rng) * 0.5 : real(rng);
    if (*std::max_element(eta.begin(), eta.end()) == 0.0) eta[0] = 1.0;
    const double theta = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    EXPECT_EQ(dorfler_mark(eta, theta).triangles, oracle::dorfler_brute_force(eta, theta)) << "trial " << trial;
  }
}

TEST(Mesh, BarycentricAndCentroid)
{
  auto m = unit_square(3);
  for (int t = 0; t < m->num_triangles(); ++t) {
    const auto b = m->barycentric(t, m->centroid(t));
    for (double v : b) EXPECT_NEAR(v, 1.0 / 3.0, 1e-14);
  }
}
