#pragma once

// Experiment drivers behind the command-line tool. Each writes its
// artifacts into the configured output directory.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "config.hpp"
#include "io.hpp"

namespace dgc {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitIo = 3, kExitInternal = 4 };

inline RunConfig parse_config(const std::filesystem::path& path)
{
  if (!std::filesystem::exists(path)) throw ConfigError("config: file not found: " + path.string());
  return parse_config_text(read_file(path));
}

/// Data-scale diagnostics that do not stop a run.
inline std::vector<std::string> run_warnings(const RunConfig& c)
{
  std::vector<std::string> out;
  const MethodVariant variant = method_variant(c);
  if (auto w = penalty_warning(variant, material(c))) out.push_back(*w);
  if (variant.uses_local_lifting() && variant.penalty > 1e3) {
    out.push_back("lifting penalty " + format_double(variant.penalty) +
                  " is dimensionless for " + to_string(variant.kind) +
                  "; values this large make the Uzawa iteration very slow (use an absolute \"penalty\" such as 4..30)");
  }
  const auto& g = c.geometry;
  const std::array<BoundaryLabel, 4> sides{g.left, g.right, g.bottom, g.top};
  const std::array<std::pair<Vec2, Vec2>, 4> ends{{{g.lo, Vec2(g.lo.x(), g.hi.y())},
                                                   {Vec2(g.hi.x(), g.lo.y()), g.hi},
                                                   {g.lo, Vec2(g.hi.x(), g.lo.y())},
                                                   {Vec2(g.lo.x(), g.hi.y()), g.hi}}};
  double traction = 0.0;
  for (int s = 0; s < 4; ++s) {
    if (sides[s] != BoundaryLabel::Traction) continue;
    traction = std::max({traction, c.g(ends[s].first).norm(), c.g(ends[s].second).norm()});
  }
  if (traction > 0.1 * c.young) {
    out.push_back("traction magnitude max|g| = " + format_double(traction) + " exceeds 10% of E = " +
                  format_double(c.young) + "; the linearized strain model is used as given");
  }
  return out;
}

inline Json error_json(const std::string& type, const std::string& message)
{
  return {{"status", "error"}, {"type", type}, {"message", message}};
}

namespace cli_detail {

inline void write_json(const std::filesystem::path& p, const Json& j) { write_atomic(p, j.dump(2) + "\n"); }

inline std::string level_name(int level)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "mesh_level_%02d.vtk", level);
  return buf;
}

inline void write_final(const std::filesystem::path& dir, const LevelSolution& last, const ProblemData& data, Json& report)
{
  const auto eta_t = per_element_indicators(last.estimator);
  write_atomic(dir / "solution.vtk", solution_to_vtk(last.solve.u, {{"eta_T", eta_t}}));
  write_json(dir / "solution.json", solution_to_json(last.solve.u, last.solve.lambda));
  write_atomic(dir / "estimator.csv", to_csv(estimator_table(last.estimator)));
  write_atomic(dir / "trace.csv", to_csv(trace_table(last.solve.report)));
  report["final"] = {{"solve", to_json(last.solve.report)},
                     {"estimator", to_json(last.estimator)},
                     {"oscillations", to_json(compute_oscillations(data, *last.mesh))}};
}

}  // namespace cli_detail

/// Runs the configured study and writes CSV / VTK / JSON outputs.
inline int run(const RunConfig& config, std::ostream& log = std::cerr)
{
  const std::filesystem::path dir = config.output_directory;
  Json report{{"status", "ok"}, {"config", config_to_json(config)}};
  try {
    const auto settings = study_settings(config);
    report["warnings"] = run_warnings(config);
    for (const auto& w : report["warnings"]) log << "warning: " << w.get<std::string>() << '\n';

    const StudyResult result =
        config.study.kind == StudyKind::Uniform ? uniform_study(settings) : adaptive_loop(settings);

    Json records = Json::array();
    for (const auto& r : result.records) records.push_back(to_json(r));
    report["records"] = records;
    if (config.study.kind == StudyKind::Uniform) {
      write_atomic(dir / "uniform.csv", to_csv(uniform_table(result.records)));
    }
    write_atomic(dir / "adaptive.csv", to_csv(adaptive_table(result.records)));
    for (std::size_t l = 0; l < result.meshes.size(); ++l) {
      write_atomic(dir / cli_detail::level_name(static_cast<int>(l)), mesh_to_vtk(*result.meshes[l]));
    }
    if (result.last) cli_detail::write_final(dir, *result.last, settings.data, report);
    for (const auto& r : result.records) {
      log << "level " << r.level << "  dofs " << r.dofs << "  eta " << format_double(r.eta);
      if (r.error) log << "  error " << format_double(*r.error);
      if (r.order) log << "  order " << format_double(*r.order);
      log << '\n';
    }
    if (result.failure) {
      report["status"] = "error";
      report["error"] = error_json("nonconvergence", *result.failure);
      cli_detail::write_json(dir / "report.json", report);
      cli_detail::write_json(dir / "error.json", report["error"]);
      log << "error: " << *result.failure << '\n';
      return kExitSolver;
    }
    cli_detail::write_json(dir / "report.json", report);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    try {
      cli_detail::write_json(dir / "error.json", error_json("config", e.what()));
    } catch (const Error&) {
    }
    return kExitConfig;
  } catch (const SolverError& e) {
    log << "error: " << e.what() << '\n';
    try {
      cli_detail::write_json(dir / "error.json", error_json("solver", e.what()));
    } catch (const Error&) {
    }
    return kExitSolver;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    try {
      cli_detail::write_json(dir / "error.json", error_json("internal", e.what()));
    } catch (const std::exception&) {
    }
    return kExitInternal;
  }
}

/// Evaluates the estimator on a saved solution with the data of `config`.
inline int run_estimate(const RunConfig& config, const std::filesystem::path& solution, std::ostream& log = std::cerr)
{
  const std::filesystem::path dir = config.output_directory;
  try {
    validate(config);
    const SavedSolution saved = solution_from_json(Json::parse(read_file(solution)));
    const ProblemData data = problem_data(config);
    const auto est = compute_estimator(saved.u, saved.lambda, data, method_variant(config).penalty);
    write_atomic(dir / "estimator.csv", to_csv(estimator_table(est)));
    write_atomic(dir / "estimator.vtk", mesh_to_vtk(*saved.mesh, {{"eta_T", per_element_indicators(est)}}));
    Json report{{"status", "ok"},
                {"config", config_to_json(config)},
                {"estimator", to_json(est)},
                {"oscillations", to_json(compute_oscillations(data, *saved.mesh))}};
    cli_detail::write_json(dir / "estimate.json", report);
    log << "eta_h " << format_double(est.total) << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    log << "error: malformed solution file: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace dgc
