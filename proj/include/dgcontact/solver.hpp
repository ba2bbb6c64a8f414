#pragma once

// Uzawa iteration on the friction multiplier with a semismooth Newton inner
// solve for normal compliance and the augmented friction term.

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/SparseLU>

#include "assembly.hpp"

namespace dgc {

inline double max_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

inline double matrix_inf_norm(const SparseMatrix& A)
{
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return max_norm(rows);
}

/// Sparse LU with one step of iterative refinement.
class SparseDirectSolver {
 public:
  void factorize(const SparseMatrix& A)
  {
    if (A.rows() != A.cols()) throw SingularMatrixError("matrix must be square");
    A_ = A;
    A_.makeCompressed();
    lu_.analyzePattern(A_);
    lu_.factorize(A_);
    if (lu_.info() != Eigen::Success) throw SingularMatrixError("sparse LU failed: " + lu_.lastErrorMessage());
    norm_ = matrix_inf_norm(A_);
    factored_ = true;
  }

  bool factored() const { return factored_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const
  {
    if (!factored_) throw SolverError("solve called before factorize");
    Eigen::VectorXd x = lu_.solve(b);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd r = b - A_ * x;
      if (max_norm(r) <= 1e-13 * (norm_ * max_norm(x) + max_norm(b))) break;
      x += lu_.solve(r);
    }
    if (!x.allFinite()) throw SingularMatrixError("matrix is numerically singular");
    return x;
  }

 private:
  SparseMatrix A_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  double norm_ = 0.0;
  bool factored_ = false;
};

inline Eigen::VectorXd linear_solve(const SparseMatrix& K, const Eigen::VectorXd& rhs)
{
  SparseDirectSolver solver;
  solver.factorize(K);
  return solver.solve(rhs);
}

struct InnerOptions {
  double tol = 1e-10;
  int max_iterations = 50;
  // Keep a factorized tangent while it halves the residual (chord steps);
  // false gives plain semismooth Newton with a fresh tangent every step.
  bool reuse_tangent = true;
};

struct InnerResult {
  Eigen::VectorXd u;
  int iterations = 0;
  double residual = 0.0;
};

/// Keeps the factorized tangent between inner solves; a stale tangent is
/// only used while it still contracts the residual.
struct NewtonWorkspace {
  SparseDirectSolver solver;
  int factorizations = 0;
};

inline bool has_compliance(const Mesh& mesh, const ProblemData& data)
{
  for (int e : mesh.edges_with_label(BoundaryLabel::Contact)) {
    for (double s : {0.0, 0.5, 1.0}) {
      if (data.c_n(edge_point(mesh, e, s)) > 0.0) return true;
    }
  }
  return false;
}

/// Radial projection onto the unit disc.
inline Vec2 project_unit_disc(const Vec2& v)
{
  const double n = v.norm();
  return n > 1.0 ? Vec2(v / n) : v;
}

/// Implicit friction force G(P(lambda + rho u_tau(u))) of the augmented
/// Lagrangian; absent when `table` is null.
struct FrictionTerm {
  const ContactTable* table = nullptr;
  const FrictionMultiplier* lambda = nullptr;
  double rho = 0.0;
};

namespace detail {

inline void add_friction(const FrictionTerm& fr, const Eigen::VectorXd& u, Eigen::VectorXd* residual,
                         Triplets* tangent)
{
  const auto ut = tangential_trace(u, *fr.table);
  for (std::size_t q = 0; q < fr.table->size(); ++q) {
    const auto& p = fr.table->points[q];
    if (p.c_tau <= 0.0) continue;
    const Vec2 y = fr.lambda->values[q] + fr.rho * ut[q];
    const double ny = y.norm();
    const Vec2 mult = ny > 1.0 ? Vec2(y / ny) : y;
    const Mat2 Ptau = Mat2::Identity() - p.normal * p.normal.transpose();
    // d mult / d u_tau
    const Mat2 dP = ny > 1.0 ? Mat2((Mat2::Identity() - y * y.transpose() / (ny * ny)) / ny) : Mat2::Identity();
    const Vec2 force = Ptau * mult;
    const Mat2 dforce = fr.rho * Ptau * dP * Ptau;
    const double wc = p.weight * p.c_tau;
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) {
        const int i = dof_index(p.triangle, k, c);
        if (residual) (*residual)[i] += wc * p.bary[k] * force[c];
        if (!tangent) continue;
        for (int l = 0; l < 3; ++l) {
          for (int d = 0; d < 2; ++d) {
            const double v = wc * p.bary[k] * dforce(c, d) * p.bary[l];
            if (v != 0.0) tangent->emplace_back(i, dof_index(p.triangle, l, d), v);
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Semismooth Newton on R(u) = K u + r(u) [+ friction] - F_eff.
inline InnerResult inner_newton(const SparseMatrix& K, const Eigen::VectorXd& F_eff, const Mesh& mesh,
                                const ProblemData& data, const InnerOptions& opts, Eigen::VectorXd u,
                                NewtonWorkspace& ws, const FrictionTerm& friction = {})
{
  const bool compliance = has_compliance(mesh, data);
  const bool with_friction = friction.table != nullptr && friction.table->size() > 0;
  const double K_norm = matrix_inf_norm(K);
  auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd R = K * x - F_eff;
    if (compliance) R += compliance_residual(x, mesh, data).residual;
    if (with_friction) detail::add_friction(friction, x, &R, nullptr);
    return R;
  };
  auto refactor = [&](const Eigen::VectorXd& x) {
    SparseMatrix A = K;
    if (compliance) A += compliance_residual(x, mesh, data).tangent;
    if (with_friction) {
      Triplets trip;
      detail::add_friction(friction, x, nullptr, &trip);
      SparseMatrix T(K.rows(), K.cols());
      T.setFromTriplets(trip.begin(), trip.end());
      A += T;
    }
    ws.solver.factorize(A);
    ++ws.factorizations;
  };
  // The floor tracks the rounding level of K u so that large penalties do not
  // make the relative tolerance unreachable.
  auto target = [&](const Eigen::VectorXd& x) {
    return std::max(opts.tol * (1.0 + max_norm(F_eff)),
                    64.0 * std::numeric_limits<double>::epsilon() * (K_norm * max_norm(x) + max_norm(F_eff)));
  };

  InnerResult out;
  Eigen::VectorXd R = residual(u);
  double rn = max_norm(R);
  bool fresh = false;
  while (rn > target(u)) {
    if (out.iterations >= opts.max_iterations) {
      throw NonconvergenceError("inner Newton did not converge in " + std::to_string(opts.max_iterations) + " steps");
    }
    if (!ws.solver.factored() || (!opts.reuse_tangent && !fresh)) {
      refactor(u);
      fresh = true;
    }
    Eigen::VectorXd du = ws.solver.solve(-R);
    Eigen::VectorXd trial = u + du;
    Eigen::VectorXd Rt = residual(trial);
    double rt = max_norm(Rt);
    if (!fresh && rt > 0.5 * rn) {
      refactor(u);
      fresh = true;
      continue;
    }
    if (rt >= rn) {
      double alpha = 1.0;
      int halvings = 0;
      while (rt >= rn && halvings < 30) {
        alpha *= 0.5;
        ++halvings;
        trial = u + alpha * du;
        Rt = residual(trial);
        rt = max_norm(Rt);
      }
      if (rt >= rn) throw NonconvergenceError("line search failed in inner Newton (singular tangent?)");
    }
    u = std::move(trial);
    R = std::move(Rt);
    rn = rt;
    fresh = false;
    ++out.iterations;
  }
  out.u = std::move(u);
  out.residual = rn;
  return out;
}

struct UzawaOptions {
  std::optional<double> rho;  // augmentation step; the shear modulus when empty
  double tol = 1e-8;
  // Bound on max |lambda^{k+1} - lambda^k|; a negative value disables the check.
  double lambda_tol = 1e-8;
  int max_outer = 100000;
  InnerOptions inner;
  // Called after every outer iteration with the new displacement and multiplier.
  std::function<void(int, const Eigen::VectorXd&, const FrictionMultiplier&)> observer;
};

struct TraceRow {
  int iteration = 0;
  double increment = 0.0;
  double residual = 0.0;
  int inner_iterations = 0;
};

struct SolveReport {
  bool converged = false;
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  double final_increment = 0.0;
  std::vector<double> residual_norms;
  double wall_time_seconds = 0.0;
  double rho = 0.0;
  double max_multiplier = 0.0;
  double lambda_increment = 0.0;
  int factorizations = 0;
  std::vector<TraceRow> trace;
};

struct SolveResult {
  DGFunction u;
  FrictionMultiplier lambda;
  SolveReport report;
};

inline bool has_friction(const ContactTable& table)
{
  return std::any_of(table.points.begin(), table.points.end(), [](const auto& p) { return p.c_tau > 0.0; });
}

/// Augmented-Lagrangian Uzawa: solve K u + r(u) + G(P(lambda + rho u_tau)) = F,
/// then lambda <- P(lambda + rho u_tau). Stops on the relative max-norm change of u
/// together with the max change of lambda.
inline SolveResult uzawa_solve(const AssembledSystem& sys, const ProblemData& data, const UzawaOptions& opts = {},
                               const DGFunction* warm_u = nullptr, const FrictionMultiplier* warm_lambda = nullptr)
{
  const auto start = std::chrono::steady_clock::now();
  const Mesh& mesh = *sys.mesh;
  const int ndof = sys.ndof();

  SolveReport report;
  FrictionMultiplier lambda{std::vector<Vec2>(sys.contact.size(), Vec2::Zero())};
  if (warm_lambda) {
    if (warm_lambda->values.size() != sys.contact.size()) throw Error("warm-start multiplier has the wrong size");
    for (std::size_t q = 0; q < lambda.values.size(); ++q) lambda.values[q] = project_unit_disc(warm_lambda->values[q]);
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ndof);
  if (warm_u) {
    if (warm_u->mesh() != sys.mesh) throw Error("warm-start displacement lives on another mesh");
    u = warm_u->coeffs();
  }

  const bool friction = has_friction(sys.contact);
  NewtonWorkspace ws;
  if (friction) {
    report.rho = opts.rho.value_or(data.mat.mu);
    if (!(report.rho > 0.0)) throw ConfigError("Uzawa step rho must be positive");
  }

  for (int k = 1; k <= opts.max_outer; ++k) {
    FrictionTerm term;
    if (friction) term = {&sys.contact, &lambda, report.rho};
    InnerResult inner = inner_newton(sys.K, sys.F, mesh, data, opts.inner, u, ws, term);
    const double increment = max_norm(inner.u - u);
    const double scale = max_norm(inner.u);
    u = std::move(inner.u);

    double lambda_change = 0.0;
    if (friction) {
      const auto ut = tangential_trace(u, sys.contact);
      for (std::size_t q = 0; q < lambda.values.size(); ++q) {
        const Vec2 next = project_unit_disc(lambda.values[q] + report.rho * ut[q]);
        lambda_change = std::max(lambda_change, (next - lambda.values[q]).norm());
        lambda.values[q] = next;
      }
    }
    report.outer_iterations = k;
    report.inner_iterations.push_back(inner.iterations);
    report.residual_norms.push_back(inner.residual);
    report.final_increment = scale > 0.0 ? increment / scale : increment;
    report.lambda_increment = lambda_change;
    report.trace.push_back({k, report.final_increment, inner.residual, inner.iterations});
    if (opts.observer) opts.observer(k, u, lambda);

    // Residual slip at stick points equals the multiplier change over rho, so
    // both increments must be small.
    if (!friction || (increment <= opts.tol * scale && (opts.lambda_tol < 0.0 || lambda_change <= opts.lambda_tol))) {
      report.converged = true;
      break;
    }
  }
  report.factorizations = ws.factorizations;
  report.max_multiplier = lambda.max_magnitude();
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!report.converged) {
    throw NonconvergenceError("Uzawa did not converge in " + std::to_string(opts.max_outer) +
                              " outer iterations; the augmented step rho (solver.rho) may be too small for this stiffness");
  }
  return {DGFunction(sys.mesh, std::move(u)), std::move(lambda), std::move(report)};
}

}  // namespace dgc
