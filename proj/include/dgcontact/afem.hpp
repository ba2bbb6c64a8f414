#pragma once

// Uniform convergence study and adaptive SOLVE-ESTIMATE-MARK-REFINE loop.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "estimator.hpp"
#include "solver.hpp"

namespace dgc {

struct StudySettings {
  MeshPtr initial_mesh;
  ProblemData data;
  MethodVariant variant;
  UzawaOptions solver;
  int levels = 2;
  double theta = 0.3;
  std::optional<int> max_dof;  // adaptive only: stop once a level reaches it
  bool warm_start = true;
};

struct StudyRecord {
  int level = 0;
  double h = 0.0;  // shortest edge of the level mesh
  int dofs = 0;
  std::optional<double> error;  // uniform: ||embed(u_l) - u_{l+1}||_h
  std::optional<double> order;
  double eta = 0.0;
  int outer_iterations = 0;
  double solve_seconds = 0.0;
};

struct LevelSolution {
  MeshPtr mesh;
  SolveResult solve;
  EstimatorBreakdown estimator;
};

struct StudyResult {
  std::vector<StudyRecord> records;
  std::vector<MeshPtr> meshes;
  std::optional<LevelSolution> last;
  std::optional<std::string> failure;  // set when a level aborted; earlier records stay valid
};

inline double shortest_edge(const Mesh& mesh)
{
  double h = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_edges(); ++e) h = std::min(h, mesh.edge_length(e));
  return h;
}

/// Order log2(e_{l-1} / e_l) per consecutive pair of errors.
inline std::vector<double> convergence_orders(const std::vector<double>& errors)
{
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

/// Carries the multiplier of a coarse solve to the contact points of a
/// descendant mesh: linear interpolation along the coarse edge between its
/// two points, then projection onto the unit disc.
inline FrictionMultiplier transfer_multiplier(const FrictionMultiplier& lambda, const ContactTable& coarse,
                                              const MeshPtr& coarse_mesh, const ContactTable& fine,
                                              const MeshPtr& fine_mesh)
{
  static_assert(ContactTable::kPointsPerEdge == 2);
  FrictionMultiplier out{std::vector<Vec2>(fine.size(), Vec2::Zero())};
  if (coarse.size() == 0) return out;
  const auto ancestor = ancestor_map(coarse_mesh, fine_mesh);
  const double a = quad::gauss2().points[0];
  const Mesh& cm = *coarse_mesh;
  for (std::size_t q = 0; q < fine.size(); ++q) {
    const int T = ancestor[fine.points[q].triangle];
    const Vec2& x = fine.points[q].x;
    for (std::size_t j = 0; j + 1 < coarse.size(); j += 2) {
      if (coarse.points[j].triangle != T) continue;
      const int e = coarse.points[j].edge;
      const Vec2 p0 = cm.vertex(cm.edge(e).vertices[0]), p1 = cm.vertex(cm.edge(e).vertices[1]);
      const Vec2 d = p1 - p0;
      const double s = (x - p0).dot(d) / d.squaredNorm();
      if (std::abs(cross2(d, x - p0)) > 1e-10 * d.squaredNorm() || s < -1e-12 || s > 1.0 + 1e-12) continue;
      const double w = (s - a) / (1.0 - 2.0 * a);
      out.values[q] = project_unit_disc((1.0 - w) * lambda.values[j] + w * lambda.values[j + 1]);
      break;
    }
  }
  return out;
}

namespace detail {

struct WarmStart {
  DGFunction u;
  FrictionMultiplier lambda;
};

inline LevelSolution solve_level(const MeshPtr& mesh, const StudySettings& s, const std::optional<LevelSolution>& prev)
{
  const auto sys = assemble_system(mesh, s.variant, s.data);
  std::optional<WarmStart> warm;
  if (s.warm_start && prev) {
    warm = WarmStart{embed(prev->solve.u, mesh),
                     transfer_multiplier(prev->solve.lambda, build_contact_table(*prev->mesh, s.data), prev->mesh,
                                         sys.contact, mesh)};
  }
  auto result = uzawa_solve(sys, s.data, s.solver, warm ? &warm->u : nullptr, warm ? &warm->lambda : nullptr);
  auto est = compute_estimator(result.u, result.lambda, s.data, s.variant.penalty);
  return {mesh, std::move(result), std::move(est)};
}

inline StudyRecord make_record(int level, const LevelSolution& sol)
{
  StudyRecord r;
  r.level = level;
  r.h = shortest_edge(*sol.mesh);
  r.dofs = kDofsPerTriangle * sol.mesh->num_triangles();
  r.eta = sol.estimator.total;
  r.outer_iterations = sol.solve.report.outer_iterations;
  r.solve_seconds = sol.solve.report.wall_time_seconds;
  return r;
}

inline void check_settings(const StudySettings& s)
{
  if (!s.initial_mesh) throw ConfigError("study needs an initial mesh");
  if (s.levels < 1) throw ConfigError("levels must be at least 1");
  validate_variant(s.variant);
  validate_problem(s.data);
}

}  // namespace detail

/// Solves on a hierarchy where each level halves h (two bisection sweeps).
/// Record l carries the error between levels l and l+1, so the last level
/// has no error entry.
inline StudyResult uniform_study(const StudySettings& s)
{
  detail::check_settings(s);
  if (s.levels < 2) throw ConfigError("a uniform study needs at least 2 levels");
  StudyResult out;
  std::optional<LevelSolution> prev;
  MeshPtr mesh = s.initial_mesh;
  std::vector<double> errors;
  for (int level = 0; level < s.levels; ++level) {
    if (level > 0) mesh = refine_uniform(mesh, 2);
    std::optional<LevelSolution> solved;
    try {
      solved = detail::solve_level(mesh, s, prev);
    } catch (const SolverError& e) {
      out.failure = e.what();
      break;
    }
    LevelSolution& sol = *solved;
    out.meshes.push_back(mesh);
    out.records.push_back(detail::make_record(level, sol));
    if (prev) {
      const DGFunction coarse = embed(prev->solve.u, mesh);
      const DGFunction diff(mesh, coarse.coeffs() - sol.solve.u.coeffs());
      errors.push_back(dg_norm(diff, s.data.mat).value());
      auto& row = out.records[level - 1];
      row.error = errors.back();
      if (errors.size() > 1) row.order = std::log2(errors[errors.size() - 2] / errors.back());
    }
    prev = std::move(sol);
  }
  out.last = std::move(prev);
  return out;
}

/// Adaptive loop; stops at the level cap, the DOF cap, or a vanishing estimator.
inline StudyResult adaptive_loop(const StudySettings& s)
{
  detail::check_settings(s);
  if (!(s.theta > 0.0 && s.theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  StudyResult out;
  std::optional<LevelSolution> prev;
  MeshPtr mesh = s.initial_mesh;
  for (int level = 0; level < s.levels; ++level) {
    if (level > 0) mesh = refine_nvb(mesh, dorfler_mark(per_element_indicators(prev->estimator), s.theta));
    std::optional<LevelSolution> solved;
    try {
      solved = detail::solve_level(mesh, s, prev);
    } catch (const SolverError& e) {
      out.failure = e.what();
      break;
    }
    LevelSolution& sol = *solved;
    out.meshes.push_back(mesh);
    out.records.push_back(detail::make_record(level, sol));
    const bool done = sol.estimator.total == 0.0 || (s.max_dof && out.records.back().dofs >= *s.max_dof);
    prev = std::move(sol);
    if (done) break;
  }
  out.last = std::move(prev);
  return out;
}

}  // namespace dgc
