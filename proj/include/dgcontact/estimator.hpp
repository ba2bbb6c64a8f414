#pragma once

// Residual a posteriori estimator and data oscillations.

#include <array>
#include <optional>
#include <vector>

#include "assembly.hpp"

namespace dgc {

inline constexpr int kEstimatorTerms = 6;

/// Global terms eta_1..eta_6, total, and per-element squared contributions.
struct EstimatorBreakdown {
  std::array<double, kEstimatorTerms> eta{};  // square roots of the global sums
  double total = 0.0;
  // element_terms[t][i] is the share of eta_{i+1}^2 assigned to triangle t.
  std::vector<std::array<double, kEstimatorTerms>> element_terms;

  double total_squared() const { return total * total; }
};

struct OscillationReport {
  double f = 0.0;
  double g = 0.0;
  double c_tau = 0.0;
  // The oscillation of the exact multiplier is not computable from discrete data.
  std::optional<double> lambda_tau;
};

namespace detail {

/// Integrates `fn(x)` over edge e with 4-point Gauss on each of the pieces
/// separated by the interior breakpoints `cuts` (parameters in (0, 1)).
template <class Fn>
double edge_integral(const Mesh& mesh, int e, const std::vector<double>& cuts, Fn&& fn)
{
  const auto rule = quad::gauss4();
  std::vector<double> s{0.0};
  for (double c : cuts) {
    if (c > s.back() && c < 1.0) s.push_back(c);
  }
  s.push_back(1.0);
  double sum = 0.0;
  for (std::size_t p = 0; p + 1 < s.size(); ++p) {
    const double a = s[p], b = s[p + 1];
    for (int q = 0; q < rule.size; ++q) sum += rule.weights[q] * (b - a) * fn(edge_point(mesh, e, a + (b - a) * rule.points[q]));
  }
  return sum * mesh.edge_length(e);
}

inline Vec2 triangle_point(const Mesh& mesh, int t, const std::array<double, 3>& bary)
{
  const auto& tri = mesh.triangle(t);
  return bary[0] * mesh.vertex(tri[0]) + bary[1] * mesh.vertex(tri[1]) + bary[2] * mesh.vertex(tri[2]);
}

}  // namespace detail

/// Estimator terms for a converged pair (u, lambda). `penalty` is the
/// edge penalty eta of the method that produced u.
inline EstimatorBreakdown compute_estimator(const DGFunction& u, const FrictionMultiplier& lambda,
                                            const ProblemData& data, double penalty)
{
  const Mesh& mesh = *u.mesh();
  const auto table = build_contact_table(mesh, data);
  if (lambda.values.size() != table.size()) throw Error("multiplier size does not match the contact edges");
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e) && !mesh.edge(e).label) throw MeshError("boundary edge without label");
  }

  EstimatorBreakdown out;
  out.element_terms.assign(mesh.num_triangles(), {});
  const auto sigma = stress_field(u, data.mat);

  // eta_1: h_T^2 ||f||^2_T
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double integral = 0.0;
    for (const auto& p : quad::triangle_deg5()) integral += p.weight * data.f(detail::triangle_point(mesh, t, p.bary)).squaredNorm();
    const double h = mesh.diameter(t);
    out.element_terms[t][0] = h * h * mesh.area(t) * integral;
  }

  const auto add_edge = [&](int e, int term, double value) {
    const Edge& ed = mesh.edge(e);
    if (ed.is_boundary()) {
      out.element_terms[ed.triangles[0]][term] += value;
    } else {
      out.element_terms[ed.triangles[0]][term] += 0.5 * value;
      out.element_terms[ed.triangles[1]][term] += 0.5 * value;
    }
  };

  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double he = mesh.edge_length(e);
    const Edge& ed = mesh.edge(e);
    // eta_2: stress jumps are constant along the edge.
    if (!ed.is_boundary()) add_edge(e, 1, he * he * jump_tensor(sigma, mesh, e).squaredNorm());
    // eta_3
    if (mesh.is_penalized_edge(e)) add_edge(e, 2, penalty / he * jump_l2_squared(u, e));
    if (!ed.is_boundary()) continue;

    const int t = ed.triangles[0];
    const Vec2 n = mesh.outward_normal(e, 0);
    const Vec2 traction = sigma[t] * n;
    if (*ed.label == BoundaryLabel::Traction) {
      // eta_5
      add_edge(e, 4, he * detail::edge_integral(mesh, e, {}, [&](const Vec2& x) { return (traction - data.g(x)).squaredNorm(); }));
    } else if (*ed.label == BoundaryLabel::Contact) {
      // eta_6, split at the root of the (linear) penetration.
      const double sn = n.dot(traction);
      const double d0 = penetration(u.coeffs(), mesh, data, e, 0.0);
      const double d1 = penetration(u.coeffs(), mesh, data, e, 1.0);
      std::vector<double> cuts;
      if ((d0 > 0.0) != (d1 > 0.0) && d0 != d1) cuts.push_back(d0 / (d0 - d1));
      const double i6 = detail::edge_integral(mesh, e, cuts, [&](const Vec2& x) {
        const double d = u.value(t, x).dot(n) - data.g_a(x);
        const double r = sn + data.c_n(x) * (d > 0.0 ? std::pow(d, data.m_n) : 0.0);
        return r * r;
      });
      add_edge(e, 5, he * i6);
    }
  }

  // eta_4 at the multiplier points.
  for (std::size_t q = 0; q < table.size(); ++q) {
    const auto& p = table.points[q];
    const Vec2 traction = sigma[p.triangle] * p.normal;
    const Vec2 s_tau = traction - p.normal.dot(traction) * p.normal;
    const Vec2 lt = lambda.values[q] - lambda.values[q].dot(p.normal) * p.normal;
    out.element_terms[p.triangle][3] += mesh.edge_length(p.edge) * p.weight * (s_tau + p.c_tau * lt).squaredNorm();
  }

  std::array<double, kEstimatorTerms> sq{};
  for (const auto& row : out.element_terms) {
    for (int i = 0; i < kEstimatorTerms; ++i) sq[i] += row[i];
  }
  double total = 0.0;
  for (int i = 0; i < kEstimatorTerms; ++i) {
    out.eta[i] = std::sqrt(sq[i]);
    total += sq[i];
  }
  out.total = std::sqrt(total);
  return out;
}

/// Per-triangle indicators eta_T (not squared).
inline std::vector<double> per_element_indicators(const EstimatorBreakdown& b)
{
  std::vector<double> out(b.element_terms.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    double s = 0.0;
    for (double v : b.element_terms[t]) s += v;
    out[t] = std::sqrt(s);
  }
  return out;
}

inline OscillationReport compute_oscillations(const ProblemData& data, const Mesh& mesh)
{
  OscillationReport out;
  double f2 = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& rule = quad::triangle_deg5();
    Vec2 mean = Vec2::Zero();
    for (const auto& p : rule) mean += p.weight * data.f(detail::triangle_point(mesh, t, p.bary));
    double dev = 0.0;
    for (const auto& p : rule) dev += p.weight * (data.f(detail::triangle_point(mesh, t, p.bary)) - mean).squaredNorm();
    const double h = mesh.diameter(t);
    f2 += h * h * mesh.area(t) * dev;
  }
  double g2 = 0.0, c2 = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& label = mesh.edge(e).label;
    if (!label) continue;
    const double he = mesh.edge_length(e);
    if (*label == BoundaryLabel::Traction) {
      const Vec2 mean = [&] {
        Vec2 m = Vec2::Zero();
        const auto rule = quad::gauss4();
        for (int q = 0; q < rule.size; ++q) m += rule.weights[q] * data.g(edge_point(mesh, e, rule.points[q]));
        return m;
      }();
      g2 += he * detail::edge_integral(mesh, e, {}, [&](const Vec2& x) { return (data.g(x) - mean).squaredNorm(); });
    } else if (*label == BoundaryLabel::Contact) {
      const double mean = detail::edge_integral(mesh, e, {}, [&](const Vec2& x) { return data.c_tau(x); }) / he;
      c2 += he * detail::edge_integral(mesh, e, {}, [&](const Vec2& x) {
        const double d = data.c_tau(x) - mean;
        return d * d;
      });
    }
  }
  out.f = std::sqrt(f2);
  out.g = std::sqrt(g2);
  out.c_tau = std::sqrt(c2);
  return out;
}

}  // namespace dgc
