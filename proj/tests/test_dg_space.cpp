#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace dgc;

namespace {

const auto kDir = BoundaryLabel::Dirichlet;
const auto kTr = BoundaryLabel::Traction;

MeshPtr square(int n, BoundaryLabel left = kDir, BoundaryLabel others = kTr)
{
  return build_rectangle_mesh(Vec2(0, 0), Vec2(1, 1), n, side_labeler(Vec2(0, 0), Vec2(1, 1), left, others, others, others));
}

DGFunction random_dg(const MeshPtr& m, std::mt19937& rng)
{
  std::normal_distribution<double> g;
  Eigen::VectorXd c(kDofsPerTriangle * m->num_triangles());
  for (auto& x : c) x = g(rng);
  return DGFunction(m, c);
}

Mat2 sym(double a, double b, double c)
{
  Mat2 m;
  m << a, b, b, c;
  return m;
}

}  // namespace

TEST(Quadrature, RulesIntegrateMonomialsExactly)
{
  // Reference triangle (0,0),(1,0),(0,1): int x^a y^b = a! b! / (a+b+2)!
  auto exact = [](int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
  auto apply = [](const auto& rule, int a, int b) {
    double s = 0.0;
    for (const auto& p : rule) s += 0.5 * p.weight * std::pow(p.bary[1], a) * std::pow(p.bary[2], b);
    return s;
  };
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      EXPECT_NEAR(apply(quad::triangle_deg5(), a, b), exact(a, b), 1e-15) << a << "," << b;
      if (a + b <= 2) {
        EXPECT_NEAR(apply(quad::triangle_deg2(), a, b), exact(a, b), 1e-15);
      }
    }
  }
  for (int d = 0; d <= 7; ++d) {
    double s2 = 0.0, s4 = 0.0;
    const auto g2 = quad::gauss2(), g4 = quad::gauss4();
    for (int i = 0; i < g2.size; ++i) s2 += g2.weights[i] * std::pow(g2.points[i], d);
    for (int i = 0; i < g4.size; ++i) s4 += g4.weights[i] * std::pow(g4.points[i], d);
    if (d <= 3) {
      EXPECT_NEAR(s2, 1.0 / (d + 1), 1e-15);
    }
    EXPECT_NEAR(s4, 1.0 / (d + 1), 1e-15);
  }
}

TEST(Material, ExampleConstants)
{
  const auto m = MaterialParams::from_young_poisson(2000.0, 0.4);
  EXPECT_NEAR(m.mu, 5000.0 / 7.0, 1e-10);
  EXPECT_NEAR(m.lambda, 20000.0 / 7.0, 1e-10);
  const Mat2 s = stress(Mat2::Identity(), m);
  EXPECT_NEAR((s - (2 * m.lambda + 2 * m.mu) * Mat2::Identity()).norm(), 0.0, 1e-9);
  EXPECT_THROW(MaterialParams::from_young_poisson(-1.0, 0.3), ConfigError);
  EXPECT_THROW(MaterialParams::from_young_poisson(1.0, 0.5), ConfigError);
}

TEST(Stress, HookeExamples)
{
  const auto m = MaterialParams::from_lame(1.0, 1.0);
  EXPECT_EQ(stress(Mat2::Identity(), m), 4.0 * Mat2::Identity());
  EXPECT_EQ(stress(Mat2::Zero(), m), Mat2::Zero());
}

TEST(Strain, RigidMotionsAndIdentity)
{
  auto m = square(3);
  auto translation = DGFunction::interpolate(m, constant_field(Vec2(2.0, -1.0)));
  auto rotation = DGFunction::interpolate(m, [](const Vec2& p) { return Vec2(-p.y(), p.x()); });
  auto identity = DGFunction::interpolate(m, [](const Vec2& p) { return p; });
  for (int t = 0; t < m->num_triangles(); ++t) {
    EXPECT_LT(strain(translation, t).norm(), 1e-13);
    EXPECT_LT(strain(rotation, t).norm(), 1e-13);
    EXPECT_LT((strain(identity, t) - Mat2::Identity()).norm(), 1e-13);
    EXPECT_EQ(strain(identity, t)(0, 1), strain(identity, t)(1, 0));
  }
}

TEST(Strain, IsLinear)
{
  std::mt19937 rng(1);
  auto m = square(2);
  auto u = random_dg(m, rng), v = random_dg(m, rng);
  const double a = 0.75, b = -2.5;  // dyadic, so the combination is exact
  DGFunction w(m, a * u.coeffs() + b * v.coeffs());
  for (int t = 0; t < m->num_triangles(); ++t) {
    EXPECT_LT((strain(w, t) - (a * strain(u, t) + b * strain(v, t))).norm(), 1e-12);
  }
}

TEST(Strain, MatchesJacobianGradient)
{
  std::mt19937 rng(2);
  auto m = square(2);
  auto v = random_dg(m, rng);
  for (int t = 0; t < m->num_triangles(); ++t) {
    const Mat2 g = oracle::p1_gradient(*m, t, {v.vertex_value(t, 0), v.vertex_value(t, 1), v.vertex_value(t, 2)});
    EXPECT_LT((v.gradient(t) - g).norm(), 1e-12);
    EXPECT_LT((strain(v, t) - 0.5 * (g + g.transpose())).norm(), 1e-12);
  }
}

TEST(Jump, ContinuousFieldHasZeroInteriorJumps)
{
  auto m = square(4);
  auto v = DGFunction::interpolate(m, [](const Vec2& p) { return Vec2(std::sin(p.x()) + p.y(), p.x() * p.y()); });
  for (int e : m->interior_edges()) {
    for (double s : {0.0, 0.3, 1.0}) EXPECT_LT(jump_vector(v, e, edge_point(*m, e, s)).norm(), 1e-15);
  }
}

TEST(Jump, BoundaryFormulas)
{
  auto m = square(1);
  const int e = m->find_edge(1, 3);  // right side x = 1, n = (1, 0)
  ASSERT_GE(e, 0);
  ASSERT_NEAR((m->outward_normal(e) - Vec2(1, 0)).norm(), 0.0, 1e-15);
  const Vec2 x = m->edge_midpoint(e);
  auto ex = DGFunction::interpolate(m, constant_field(Vec2(1, 0)));
  auto ey = DGFunction::interpolate(m, constant_field(Vec2(0, 1)));
  EXPECT_LT((jump_vector(ex, e, x) - sym(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((jump_vector(ey, e, x) - sym(0, 0.5, 0)).norm(), 1e-15);
}

TEST(TensorTrace, AverageAndJump)
{
  auto m = square(1);
  const int diag = m->interior_edges().at(0);
  const auto& ed = m->edge(diag);
  TensorField2x2 phi(2);
  phi[ed.triangles[0]] = Mat2::Identity();
  phi[ed.triangles[1]] = -Mat2::Identity();
  EXPECT_LT(average_tensor(phi, *m, diag).norm(), 1e-15);
  EXPECT_LT((jump_tensor(phi, *m, diag) - 2.0 * m->outward_normal(diag, 0)).norm(), 1e-15);
  TensorField2x2 cont(2, sym(1, 2, 3));
  EXPECT_LT(jump_tensor(cont, *m, diag).norm(), 1e-15);
  EXPECT_LT((average_tensor(cont, *m, diag) - sym(1, 2, 3)).norm(), 1e-15);
  const int right = m->find_edge(1, 3);
  TensorField2x2 id(2, Mat2::Identity());
  EXPECT_LT((jump_tensor(id, *m, right) - Vec2(1, 0)).norm(), 1e-15);
  EXPECT_LT((average_tensor(id, *m, right) - Mat2::Identity()).norm(), 1e-15);
}

TEST(Lifting, ZeroJumpGivesZero)
{
  auto m = square(2);
  for (int e = 0; e < m->num_edges(); ++e) {
    if (!m->is_penalized_edge(e)) continue;
    const auto r = local_lifting(*m, e, [](const Vec2&) { return Mat2::Zero(); });
    for (const auto& nodes : r.nodal) {
      for (const auto& n : nodes) EXPECT_EQ(n.norm(), 0.0);
    }
  }
}

TEST(Lifting, ConstantSpaceClosedFormOnDirichletEdge)
{
  auto m = square(2);
  const int e = m->edges_with_label(kDir).at(0);
  const Mat2 q0 = sym(1.5, -0.25, 2.0);
  const auto r = local_lifting(*m, e, [&](const Vec2&) { return q0; }, LiftingSpace::Constant);
  const int t = m->edge(e).triangles[0];
  const Mat2 expected = -(m->edge_length(e) / m->area(t)) * q0;
  for (int k = 0; k < 3; ++k) EXPECT_LT((r.nodal[t][k] - expected).norm(), 1e-12);
  for (int s = 0; s < m->num_triangles(); ++s) {
    if (s != t) {
      EXPECT_EQ(r.nodal[s][0].norm(), 0.0);
    }
  }
}

TEST(Lifting, TractionEdgeIsRejected)
{
  auto m = square(2);
  const int e = m->edges_with_label(kTr).at(0);
  EXPECT_THROW(local_lifting(*m, e, [](const Vec2&) { return Mat2::Zero(); }), Error);
}

// Defining identity int r_e(q) : tau + int_e q : {{tau}} = 0 against every
// basis tensor of the lifting space on the triangles adjacent to e.
TEST(Lifting, DefiningIdentityHoldsForBothSpaces)
{
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  auto m = refine_nvb(square(2), MarkSet{{0, 3}});
  const std::array<Mat2, 3> comps{sym(1, 0, 0), sym(0, 1, 0), sym(0, 0, 1)};
  for (auto space : {LiftingSpace::Constant, LiftingSpace::Linear}) {
    double worst = 0.0;
    for (int e = 0; e < m->num_edges(); ++e) {
      if (!m->is_penalized_edge(e)) continue;
      const Mat2 q0 = sym(g(rng), g(rng), g(rng)), q1 = sym(g(rng), g(rng), g(rng));
      const Vec2 a = m->vertex(m->edge(e).vertices[0]), b = m->vertex(m->edge(e).vertices[1]);
      auto q = [&](const Vec2& x) {
        const double s = (x - a).dot(b - a) / (b - a).squaredNorm();
        return Mat2((1 - s) * q0 + s * q1);
      };
      const auto r = local_lifting(*m, e, q, space);
      const auto& ed = m->edge(e);
      const int sides = ed.is_boundary() ? 1 : 2;
      const double w = ed.is_boundary() ? 1.0 : 0.5;
      for (int side = 0; side < sides; ++side) {
        const int t = ed.triangles[side];
        const int nodes = space == LiftingSpace::Linear ? 3 : 1;
        for (int node = 0; node < nodes; ++node) {
          for (const Mat2& c : comps) {
            auto tau = [&](const Vec2& x) {
              const auto bary = m->barycentric(t, x);
              return Mat2((space == LiftingSpace::Linear ? bary[node] : 1.0) * c);
            };
            const double vol = oracle::integrate_triangle(oracle::corners(*m, t), [&](const Vec2& x) {
              return (r.value(t, m->barycentric(t, x)).array() * tau(x).array()).sum();
            });
            const double edge = m->edge_length(e) * oracle::integrate01([&](double s) {
              const Vec2 x = a + s * (b - a);
              return w * (q(x).array() * tau(x).array()).sum();
            });
            worst = std::max(worst, std::abs(vol + edge) / (std::abs(edge) + 1e-300 + q0.norm() + q1.norm()));
          }
        }
      }
    }
    EXPECT_LT(worst, 1e-12);
  }
}

TEST(DGNorm, Examples)
{
  auto m = square(3);
  const auto mat = MaterialParams::from_young_poisson(2000, 0.3);
  EXPECT_EQ(dg_norm(DGFunction(m), mat).value(), 0.0);

  // Rigid translation on a fully clamped square: no energy, Dirichlet jumps.
  auto clamped = square(3, kDir, kDir);
  auto t = DGFunction::interpolate(clamped, constant_field(Vec2(1, 0)));
  const auto n = dg_norm(t, mat);
  EXPECT_LT(n.energy(), 1e-12);
  EXPECT_GT(n.jump(), 0.0);

  // Continuous and zero on the Dirichlet side x = 0.
  auto v = DGFunction::interpolate(m, [](const Vec2& p) { return Vec2(p.x() * p.y(), p.x() * (1 - p.y())); });
  const auto nv = dg_norm(v, mat);
  EXPECT_LT(nv.jump(), 1e-13);
  EXPECT_GT(nv.energy(), 0.0);
}

TEST(DGNorm, MatchesIndependentQuadrature)
{
  std::mt19937 rng(9);
  auto m = refine_nvb(square(2), MarkSet{{1, 4, 6}});
  const auto mat = MaterialParams::from_young_poisson(2500, 0.2);
  for (int trial = 0; trial < 5; ++trial) {
    auto v = random_dg(m, rng);
    const double ref = oracle::dg_error(v, [](const Vec2&) { return Vec2(0, 0); }, [](const Vec2&) { return Mat2::Zero(); },
                                        mat.lambda, mat.mu);
    EXPECT_NEAR(dg_norm(v, mat).value(), ref, 1e-12 * ref);
    // The Gram matrix realizes the same quadratic form.
    const SparseMatrix G = assemble_norm_matrix(*m, mat);
    EXPECT_NEAR(v.coeffs().dot(G * v.coeffs()), ref * ref, 1e-10 * ref * ref);
  }
}

TEST(DGNorm, GramMatrixIsPositiveDefinite)
{
  for (int n : {1, 2, 3}) {
    auto m = square(n);
    const auto mat = MaterialParams::from_young_poisson(1.0, 0.3);
    const Eigen::MatrixXd G(assemble_norm_matrix(*m, mat));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    EXPECT_GT(es.eigenvalues().minCoeff(), 1e-8 * es.eigenvalues().maxCoeff()) << "n = " << n;
  }
}

TEST(Enrich, ContinuousFieldVanishingOnDirichletIsFixed)
{
  auto m = square(3);
  auto field = [](const Vec2& p) { return Vec2(p.x() * (1 + p.y()), p.x() * p.x()); };
  auto v = DGFunction::interpolate(m, field);
  const auto e = enrich(v);
  for (int p = 0; p < m->num_vertices(); ++p) EXPECT_LT((e.nodal[p] - field(m->vertex(p))).norm(), 1e-14);
}

TEST(Enrich, ClampsOnlyDirichletVertices)
{
  auto m = square(3);
  auto field = [](const Vec2& p) { return Vec2(1 + p.y(), 2 - p.x()); };
  const auto e = enrich(DGFunction::interpolate(m, field));
  const auto dir = m->vertices_on(kDir);
  for (int p = 0; p < m->num_vertices(); ++p) {
    if (dir[p]) {
      EXPECT_EQ(e.nodal[p].norm(), 0.0);
    } else {
      EXPECT_LT((e.nodal[p] - field(m->vertex(p))).norm(), 1e-14);
    }
  }
}

TEST(Enrich, JumpBoundStableUnderRefinement)
{
  std::mt19937 rng(13);
  auto m = square(2);
  std::vector<double> ratios;
  for (int level = 0; level < 4; ++level) {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      auto v = random_dg(m, rng);
      const auto ev = enrich(v).to_dg();
      double lhs = 0.0, rhs = 0.0;
      for (int t = 0; t < m->num_triangles(); ++t) {
        const double h = m->diameter(t);
        lhs += oracle::integrate_triangle(oracle::corners(*m, t), [&](const Vec2& x) {
                 return (ev.value(t, x) - v.value(t, x)).squaredNorm();
               }) / (h * h);
      }
      for (int e = 0; e < m->num_edges(); ++e) {
        if (m->is_penalized_edge(e)) rhs += jump_l2_squared(v, e) / m->edge_length(e);
      }
      worst = std::max(worst, lhs / rhs);
    }
    ratios.push_back(worst);
    m = refine_uniform(m, 2);
  }
  for (double r : ratios) {
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_LT(r, 2.0 * ratios.front());
  }
}

TEST(Embed, PreservesValuesAndNorms)
{
  std::mt19937 rng(17);
  auto coarse = square(2);
  auto fine = refine_nvb(refine_nvb(coarse, MarkSet{{0, 5}}), MarkSet{{2}});
  auto v = random_dg(coarse, rng);
  const auto parents = ancestor_map(coarse, fine);
  const auto w = embed(v, fine);
  for (int t = 0; t < fine->num_triangles(); ++t) {
    const Vec2 c = fine->centroid(t);
    EXPECT_LT((w.value(t, c) - v.value(parents[t], c)).norm(), 1e-13);
  }
  EXPECT_EQ(embed(DGFunction(coarse), fine).coeffs().norm(), 0.0);

  const auto mat = MaterialParams::from_young_poisson(2000, 0.4);
  auto cont = DGFunction::interpolate(coarse, [](const Vec2& p) { return Vec2(p.x() * p.y(), p.x()); });
  EXPECT_NEAR(dg_norm(embed(cont, fine), mat).value(), dg_norm(cont, mat).value(), 1e-12 * dg_norm(cont, mat).value());
}

TEST(Embed, RejectsUnrelatedMeshes)
{
  auto a = square(2), b = square(2);
  EXPECT_THROW(embed(DGFunction(a), refine_uniform(b, 1)), Error);
}
