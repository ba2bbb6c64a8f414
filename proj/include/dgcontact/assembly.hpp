#pragma once

// Bilinear forms of the five interior-penalty/lifting DG variants, the load
// functional and the contact boundary terms.

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "dg_space.hpp"

namespace dgc {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

enum class MethodKind { SIPG, NIPG, Bassi, Brezzi, LDG };

inline std::string to_string(MethodKind kind)
{
  switch (kind) {
    case MethodKind::SIPG: return "SIPG";
    case MethodKind::NIPG: return "NIPG";
    case MethodKind::Bassi: return "Bassi";
    case MethodKind::Brezzi: return "Brezzi";
    case MethodKind::LDG: return "LDG";
  }
  return "unknown";
}

/// Case-insensitive.
inline MethodKind method_from_string(const std::string& s)
{
  const auto lower = [](std::string x) {
    for (char& ch : x) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return x;
  };
  for (auto k : {MethodKind::SIPG, MethodKind::NIPG, MethodKind::Bassi, MethodKind::Brezzi, MethodKind::LDG}) {
    if (lower(s) == lower(to_string(k))) return k;
  }
  throw ConfigError("unknown method '" + s + "' (expected SIPG, NIPG, Bassi, Brezzi or LDG)");
}

struct MethodVariant {
  MethodKind kind = MethodKind::SIPG;
  double penalty = 0.0;
  LiftingSpace lifting = LiftingSpace::Linear;

  bool uses_edge_penalty() const
  {
    return kind == MethodKind::SIPG || kind == MethodKind::NIPG || kind == MethodKind::LDG;
  }
  bool uses_local_lifting() const { return kind == MethodKind::Bassi || kind == MethodKind::Brezzi; }
  bool uses_global_lifting() const { return kind == MethodKind::Brezzi || kind == MethodKind::LDG; }
  /// Sign of <[[u]], {{sigma(v)}}> in B_h(u, v).
  double consistency_sign() const { return kind == MethodKind::NIPG ? 1.0 : -1.0; }
};

/// Throws ConfigError for an inadmissible penalty.
inline void validate_variant(const MethodVariant& variant)
{
  if (!std::isfinite(variant.penalty)) throw ConfigError("penalty must be finite");
  if (variant.kind == MethodKind::Bassi) {
    if (!(variant.penalty > 3.0)) throw ConfigError("Bassi et al. requires penalty > 3");
  } else if (!(variant.penalty > 0.0)) {
    throw ConfigError(to_string(variant.kind) + " requires penalty > 0");
  }
}

/// Conditioning warning for small SIPG penalties (below 10 mu).
inline std::optional<std::string> penalty_warning(const MethodVariant& variant, const MaterialParams& mat)
{
  if (variant.kind == MethodKind::SIPG && variant.penalty < 10.0 * mat.mu) {
    return "SIPG penalty " + std::to_string(variant.penalty) + " is below 10 mu; coercivity is not guaranteed";
  }
  return std::nullopt;
}

struct ProblemData {
  MaterialParams mat;
  VectorField f = constant_field(Vec2(0.0, 0.0));
  VectorField g = constant_field(Vec2(0.0, 0.0));
  ScalarField c_n = constant_field(0.0);
  ScalarField c_tau = constant_field(0.0);
  double m_n = 1.0;
  ScalarField g_a = constant_field(0.0);
};

inline void validate_problem(const ProblemData& data)
{
  if (!(data.mat.lambda > 0.0 && data.mat.mu > 0.0)) throw ConfigError("Lamé coefficients must be positive");
  if (!(data.m_n >= 1.0) || !std::isfinite(data.m_n)) throw ConfigError("compliance exponent m_n must be >= 1");
}

/// One point of the 2-point Gauss rule carrying the friction multiplier.
struct ContactPoint {
  int edge = -1;
  int triangle = -1;
  Vec2 x;
  double weight = 0.0;  // includes the edge length
  Vec2 normal;
  Vec2 tangent;
  double c_n = 0.0;
  double c_tau = 0.0;
  double g_a = 0.0;
  std::array<double, 3> bary{};
};

/// Edge-major table: points [2 i, 2 i + 2) belong to edges[i].
struct ContactTable {
  std::vector<int> edges;
  std::vector<ContactPoint> points;

  static constexpr int kPointsPerEdge = 2;
  std::size_t size() const { return points.size(); }
};

inline ContactTable build_contact_table(const Mesh& mesh, const ProblemData& data)
{
  ContactTable table;
  table.edges = mesh.edges_with_label(BoundaryLabel::Contact);
  const auto rule = quad::gauss2();
  for (int e : table.edges) {
    const int t = mesh.edge(e).triangles[0];
    const Vec2 n = mesh.outward_normal(e, 0);
    const double len = mesh.edge_length(e);
    for (int q = 0; q < rule.size; ++q) {
      ContactPoint p;
      p.edge = e;
      p.triangle = t;
      p.x = edge_point(mesh, e, rule.points[q]);
      p.weight = rule.weights[q] * len;
      p.normal = n;
      p.tangent = Vec2(-n.y(), n.x());
      p.c_n = data.c_n(p.x);
      p.c_tau = data.c_tau(p.x);
      p.g_a = data.g_a(p.x);
      if (p.c_n < 0.0 || p.c_tau < 0.0) throw ConfigError("contact coefficients must be nonnegative");
      if (p.g_a < 0.0) throw ConfigError("gap g_a must be nonnegative");
      p.bary = mesh.barycentric(t, p.x);
      table.points.push_back(p);
    }
  }
  return table;
}

namespace detail {

struct EdgeDof {
  int global;
  int side;
  int k;
  int c;
  Mat2 N;  // sym(e_c ⊗ n_side)
  Mat2 avg_stress;  // average weight * sigma(basis strain)
};

inline std::vector<EdgeDof> edge_dofs(const Mesh& mesh, int e, const MaterialParams& mat)
{
  const Edge& ed = mesh.edge(e);
  const int sides = ed.is_boundary() ? 1 : 2;
  const double w = average_weight(mesh, e);
  std::vector<EdgeDof> dofs;
  dofs.reserve(6 * sides);
  for (int s = 0; s < sides; ++s) {
    const int t = ed.triangles[s];
    const Vec2 n = mesh.outward_normal(e, s);
    const auto grads = barycentric_gradients(mesh, t);
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) {
        dofs.push_back({dof_index(t, k, c), s, k, c, sym_outer(Vec2::Unit(c), n),
                        w * stress(basis_strain(grads, k, c), mat)});
      }
    }
  }
  return dofs;
}

// Barycentric values at parameter s on edge e for every edge dof.
inline std::vector<double> edge_basis_values(const Mesh& mesh, int e, const std::vector<EdgeDof>& dofs, double s)
{
  const Vec2 x = edge_point(mesh, e, s);
  const Edge& ed = mesh.edge(e);
  std::array<std::array<double, 3>, 2> bary{};
  bary[0] = mesh.barycentric(ed.triangles[0], x);
  if (!ed.is_boundary()) bary[1] = mesh.barycentric(ed.triangles[1], x);
  std::vector<double> out(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) out[i] = bary[dofs[i].side][dofs[i].k];
  return out;
}

// Q_j = integral over e of [[phi_j]] for every edge dof.
inline std::vector<Mat2> integrated_jumps(const Mesh& mesh, int e, const std::vector<EdgeDof>& dofs)
{
  const auto rule = quad::gauss2();
  const double len = mesh.edge_length(e);
  std::vector<Mat2> q(dofs.size(), Mat2::Zero());
  for (int p = 0; p < rule.size; ++p) {
    const auto vals = edge_basis_values(mesh, e, dofs, rule.points[p]);
    for (std::size_t i = 0; i < dofs.size(); ++i) q[i] += rule.weights[p] * len * vals[i] * dofs[i].N;
  }
  return q;
}

inline Mat2 apply_elasticity(const Mat2& q, const MaterialParams& mat) { return stress(q, mat); }

// Lifting moments of every edge dof against the barycentric functions of the
// triangle on `side`: w * integral_e [[phi_j]] lambda_l ds.
inline std::vector<std::array<Mat2, 3>> jump_moments(const Mesh& mesh, int e, const std::vector<EdgeDof>& dofs, int side)
{
  const auto rule = quad::gauss2();
  const int t = mesh.edge(e).triangles[side];
  const double scale = average_weight(mesh, e) * mesh.edge_length(e);
  std::vector<std::array<Mat2, 3>> out(dofs.size(), {Mat2::Zero(), Mat2::Zero(), Mat2::Zero()});
  for (int p = 0; p < rule.size; ++p) {
    const auto vals = edge_basis_values(mesh, e, dofs, rule.points[p]);
    const auto bary = mesh.barycentric(t, edge_point(mesh, e, rule.points[p]));
    for (std::size_t j = 0; j < dofs.size(); ++j) {
      for (int l = 0; l < 3; ++l) out[j][l] += scale * rule.weights[p] * vals[j] * bary[l] * dofs[j].N;
    }
  }
  return out;
}

// integral_T C r(phi_j) : r(phi_i) for liftings with moments bj, bi on T.
inline double lifting_gram(const std::array<Mat2, 3>& bj, const std::array<Mat2, 3>& bi, double area,
                           LiftingSpace space, const MaterialParams& mat)
{
  if (space == LiftingSpace::Constant) {
    return frobenius(apply_elasticity(bj[0] + bj[1] + bj[2], mat), bi[0] + bi[1] + bi[2]) / area;
  }
  const Eigen::Matrix3d& minv = p1_inverse_mass_unit();
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Mat2 cb = apply_elasticity(bj[k], mat);
    for (int l = 0; l < 3; ++l) sum += minv(k, l) * frobenius(cb, bi[l]);
  }
  return sum / area;
}

}  // namespace detail

/// Element stiffness plus edge terms of the chosen variant; rows are test
/// functions, columns trial functions: K(i, j) = B_h(phi_j, phi_i).
inline SparseMatrix assemble_bilinear(const Mesh& mesh, const MethodVariant& variant, const MaterialParams& mat)
{
  validate_variant(variant);
  const int ndof = kDofsPerTriangle * mesh.num_triangles();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 36 * 6);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto grads = barycentric_gradients(mesh, t);
    std::array<Mat2, 6> eps, sig;
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) {
        eps[2 * k + c] = basis_strain(grads, k, c);
        sig[2 * k + c] = stress(eps[2 * k + c], mat);
      }
    }
    const double area = mesh.area(t);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        trip.emplace_back(dof_index(t, 0, 0) + i, dof_index(t, 0, 0) + j, area * frobenius(sig[j], eps[i]));
      }
    }
  }

  const double sign = variant.consistency_sign();
  const auto rule = quad::gauss2();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_penalized_edge(e)) continue;
    const auto dofs = detail::edge_dofs(mesh, e, mat);
    const auto Q = detail::integrated_jumps(mesh, e, dofs);
    const std::size_t n = dofs.size();
    const double len = mesh.edge_length(e);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        local(i, j) += sign * frobenius(Q[j], dofs[i].avg_stress) - frobenius(Q[i], dofs[j].avg_stress);
      }
    }
    if (variant.uses_edge_penalty()) {
      for (int p = 0; p < rule.size; ++p) {
        const auto vals = detail::edge_basis_values(mesh, e, dofs, rule.points[p]);
        const double scale = variant.penalty / len * rule.weights[p] * len;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            local(i, j) += scale * vals[i] * vals[j] * frobenius(dofs[i].N, dofs[j].N);
          }
        }
      }
    }
    if (variant.uses_local_lifting()) {
      const Edge& ed = mesh.edge(e);
      for (int side = 0; side < (ed.is_boundary() ? 1 : 2); ++side) {
        const auto b = detail::jump_moments(mesh, e, dofs, side);
        const double area = mesh.area(ed.triangles[side]);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            local(i, j) += variant.penalty * detail::lifting_gram(b[j], b[i], area, variant.lifting, mat);
          }
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) trip.emplace_back(dofs[i].global, dofs[j].global, local(i, j));
    }
  }

  if (variant.uses_global_lifting()) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      // Moments of r_0(phi_j) on T: sum over the penalized edges of T.
      std::vector<std::pair<int, std::array<Mat2, 3>>> lift;
      for (int k = 0; k < 3; ++k) {
        const int e = mesh.triangle_edges(t)[k];
        if (!mesh.is_penalized_edge(e)) continue;
        const int side = mesh.edge(e).triangles[0] == t ? 0 : 1;
        const auto dofs = detail::edge_dofs(mesh, e, mat);
        const auto b = detail::jump_moments(mesh, e, dofs, side);
        for (std::size_t j = 0; j < dofs.size(); ++j) {
          auto it = std::find_if(lift.begin(), lift.end(), [&](const auto& p) { return p.first == dofs[j].global; });
          if (it == lift.end()) {
            lift.emplace_back(dofs[j].global, b[j]);
          } else {
            for (int l = 0; l < 3; ++l) it->second[l] += b[j][l];
          }
        }
      }
      const double area = mesh.area(t);
      for (const auto& [gi, bi] : lift) {
        for (const auto& [gj, bj] : lift) {
          trip.emplace_back(gi, gj, detail::lifting_gram(bj, bi, area, variant.lifting, mat));
        }
      }
    }
  }

  SparseMatrix K(ndof, ndof);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  return K;
}

/// (f, phi_i) + (g, phi_i)_{Gamma_F}: edge-midpoint rule in the volume,
/// 2-point Gauss on traction edges.
inline Eigen::VectorXd assemble_load(const Mesh& mesh, const ProblemData& data)
{
  Eigen::VectorXd F = Eigen::VectorXd::Zero(kDofsPerTriangle * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const double area = mesh.area(t);
    for (const auto& qp : quad::triangle_deg2()) {
      Vec2 x = Vec2::Zero();
      for (int k = 0; k < 3; ++k) x += qp.bary[k] * mesh.vertex(tri[k]);
      const Vec2 fx = data.f(x);
      for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < 2; ++c) F[dof_index(t, k, c)] += qp.weight * area * qp.bary[k] * fx[c];
      }
    }
  }
  const auto rule = quad::gauss2();
  for (int e : mesh.edges_with_label(BoundaryLabel::Traction)) {
    const int t = mesh.edge(e).triangles[0];
    const double len = mesh.edge_length(e);
    const auto& ed = mesh.edge(e);
    for (int p = 0; p < rule.size; ++p) {
      const double s = rule.points[p];
      const Vec2 gx = data.g(edge_point(mesh, e, s));
      for (int k = 0; k < 3; ++k) {
        // Edge restriction of the hat functions; the opposite vertex gets exactly 0.
        const int v = mesh.triangle(t)[k];
        const double phi = v == ed.vertices[0] ? 1.0 - s : (v == ed.vertices[1] ? s : 0.0);
        for (int c = 0; c < 2; ++c) F[dof_index(t, k, c)] += rule.weights[p] * len * phi * gx[c];
      }
    }
  }
  return F;
}

/// Active part [s0, s1] of a contact edge where the linear penetration
/// d(s) = d0 (1 - s) + d1 s is positive; nullopt when inactive.
inline std::optional<std::pair<double, double>> active_interval(double d0, double d1)
{
  if (d0 <= 0.0 && d1 <= 0.0) return std::nullopt;
  if (d0 > 0.0 && d1 > 0.0) return std::pair{0.0, 1.0};
  const double root = d0 / (d0 - d1);
  return d0 > 0.0 ? std::pair{0.0, root} : std::pair{root, 1.0};
}

struct ComplianceTerms {
  Eigen::VectorXd residual;
  SparseMatrix tangent;
};

/// Penetration u_n - g_a at parameter s of contact edge e.
inline double penetration(const Eigen::VectorXd& u, const Mesh& mesh, const ProblemData& data, int e, double s)
{
  const int t = mesh.edge(e).triangles[0];
  const Vec2 x = edge_point(mesh, e, s);
  const auto bary = mesh.barycentric(t, x);
  Vec2 ux = Vec2::Zero();
  for (int k = 0; k < 3; ++k) ux += bary[k] * Vec2(u[dof_index(t, k, 0)], u[dof_index(t, k, 1)]);
  return ux.dot(mesh.outward_normal(e, 0)) - data.g_a(x);
}

/// Visits the split 4-point Gauss rule on the active part of every contact
/// edge: f(edge, triangle, x, weight, bary, normal, penetration).
template <class Visitor>
void for_each_active_contact_point(const Eigen::VectorXd& u, const Mesh& mesh, const ProblemData& data,
                                   Visitor&& visit)
{
  const auto rule = quad::gauss4();
  for (int e : mesh.edges_with_label(BoundaryLabel::Contact)) {
    const auto interval = active_interval(penetration(u, mesh, data, e, 0.0), penetration(u, mesh, data, e, 1.0));
    if (!interval) continue;
    const auto [s0, s1] = *interval;
    const int t = mesh.edge(e).triangles[0];
    const Vec2 n = mesh.outward_normal(e, 0);
    const double len = mesh.edge_length(e);
    for (int q = 0; q < rule.size; ++q) {
      const double s = s0 + (s1 - s0) * rule.points[q];
      const Vec2 x = edge_point(mesh, e, s);
      const auto bary = mesh.barycentric(t, x);
      Vec2 ux = Vec2::Zero();
      for (int k = 0; k < 3; ++k) ux += bary[k] * Vec2(u[dof_index(t, k, 0)], u[dof_index(t, k, 1)]);
      const double d = ux.dot(n) - data.g_a(x);
      visit(e, t, x, rule.weights[q] * (s1 - s0) * len, bary, n, d);
    }
  }
}

/// r_i = int_{Gamma_C} c_n (u_n - g_a)_+^{m_n} (phi_i)_n and its generalized
/// derivative, integrated exactly for P1 traces by splitting at the root.
inline ComplianceTerms compliance_residual(const Eigen::VectorXd& u, const Mesh& mesh, const ProblemData& data)
{
  const int ndof = kDofsPerTriangle * mesh.num_triangles();
  ComplianceTerms out{Eigen::VectorXd::Zero(ndof), SparseMatrix(ndof, ndof)};
  Triplets trip;
  const double m = data.m_n;
  for_each_active_contact_point(u, mesh, data,
                                [&](int, int t, const Vec2& x, double w, const auto& bary, const Vec2& n, double d) {
                                  if (d <= 0.0) return;
                                  const double cn = data.c_n(x);
                                  const double value = cn * std::pow(d, m);
                                  const double slope = cn * m * std::pow(d, m - 1.0);
                                  for (int k = 0; k < 3; ++k) {
                                    for (int c = 0; c < 2; ++c) {
                                      const double phi_i = bary[k] * n[c];
                                      out.residual[dof_index(t, k, c)] += w * value * phi_i;
                                      for (int l = 0; l < 3; ++l) {
                                        for (int dcomp = 0; dcomp < 2; ++dcomp) {
                                          trip.emplace_back(dof_index(t, k, c), dof_index(t, l, dcomp),
                                                            w * slope * phi_i * bary[l] * n[dcomp]);
                                        }
                                      }
                                    }
                                  }
                                });
  out.tangent.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// Discrete friction multiplier: one tangential vector per contact point.
struct FrictionMultiplier {
  std::vector<Vec2> values;

  double max_magnitude() const
  {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, v.norm());
    return m;
  }
};

/// G_i = sum over contact points of w c_tau lambda . (phi_i)_tau.
inline Eigen::VectorXd friction_coupling(const FrictionMultiplier& lambda, const ContactTable& table, int ndof)
{
  if (lambda.values.size() != table.size()) throw Error("multiplier size does not match the contact table");
  Eigen::VectorXd G = Eigen::VectorXd::Zero(ndof);
  for (std::size_t q = 0; q < table.size(); ++q) {
    const auto& p = table.points[q];
    const Vec2& l = lambda.values[q];
    if (l.norm() > 1.0 + 1e-12) throw Error("friction multiplier is infeasible (|lambda| > 1)");
    const Vec2 lt = l - l.dot(p.normal) * p.normal;
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) G[dof_index(p.triangle, k, c)] += p.weight * p.c_tau * p.bary[k] * lt[c];
    }
  }
  return G;
}

/// Tangential displacement u_tau at every contact point.
inline std::vector<Vec2> tangential_trace(const Eigen::VectorXd& u, const ContactTable& table)
{
  std::vector<Vec2> out(table.size());
  for (std::size_t q = 0; q < table.size(); ++q) {
    const auto& p = table.points[q];
    Vec2 ux = Vec2::Zero();
    for (int k = 0; k < 3; ++k) ux += p.bary[k] * Vec2(u[dof_index(p.triangle, k, 0)], u[dof_index(p.triangle, k, 1)]);
    out[q] = ux - ux.dot(p.normal) * p.normal;
  }
  return out;
}

struct AssembledSystem {
  MeshPtr mesh;
  MethodVariant variant;
  SparseMatrix K;
  Eigen::VectorXd F;
  ContactTable contact;

  int ndof() const { return static_cast<int>(F.size()); }
};

inline AssembledSystem assemble_system(const MeshPtr& mesh, const MethodVariant& variant, const ProblemData& data)
{
  validate_problem(data);
  if (mesh->edges_with_label(BoundaryLabel::Dirichlet).empty()) {
    throw ConfigError("the Dirichlet boundary must be nonempty");
  }
  return {mesh, variant, assemble_bilinear(*mesh, variant, data.mat), assemble_load(*mesh, data),
          build_contact_table(*mesh, data)};
}

/// Gram matrix of the DG norm: broken energy plus h_e^{-1} jump terms.
inline SparseMatrix assemble_norm_matrix(const Mesh& mesh, const MaterialParams& mat)
{
  const int ndof = kDofsPerTriangle * mesh.num_triangles();
  Triplets trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto grads = barycentric_gradients(mesh, t);
    for (int i = 0; i < 6; ++i) {
      const Mat2 ei = basis_strain(grads, i / 2, i % 2);
      for (int j = 0; j < 6; ++j) {
        const Mat2 ej = basis_strain(grads, j / 2, j % 2);
        trip.emplace_back(dof_index(t, 0, 0) + i, dof_index(t, 0, 0) + j, mesh.area(t) * frobenius(stress(ej, mat), ei));
      }
    }
  }
  const auto rule = quad::gauss2();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_penalized_edge(e)) continue;
    const auto dofs = detail::edge_dofs(mesh, e, mat);
    for (int p = 0; p < rule.size; ++p) {
      const auto vals = detail::edge_basis_values(mesh, e, dofs, rule.points[p]);
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        for (std::size_t j = 0; j < dofs.size(); ++j) {
          trip.emplace_back(dofs[i].global, dofs[j].global,
                            rule.weights[p] * vals[i] * vals[j] * frobenius(dofs[i].N, dofs[j].N));
        }
      }
    }
  }
  SparseMatrix N(ndof, ndof);
  N.setFromTriplets(trip.begin(), trip.end());
  return N;
}

}  // namespace dgc
