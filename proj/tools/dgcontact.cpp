// Command-line driver: uniform and adaptive studies, and one-shot estimation
// of a saved solution.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <dgcontact/cli.hpp>

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string method;
  std::optional<double> theta;
  std::optional<int> levels;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
  auto* cfg = cmd->add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "built-in configuration")
      ->check(CLI::IsMember({"example1", "example2"}))
      ->excludes(cfg);
  cmd->add_option("--method", f.method, "DG variant")->check(CLI::IsMember({"SIPG", "NIPG", "Bassi", "Brezzi", "LDG"}));
  cmd->add_option("--theta", f.theta, "Dörfler parameter in (0, 1]");
  cmd->add_option("--levels", f.levels, "number of levels");
  cmd->add_option("--out", f.out, "output directory");
}

dgc::RunConfig build_config(const CommonFlags& f, std::optional<dgc::StudyKind> kind)
{
  dgc::RunConfig c;
  if (!f.config_path.empty()) {
    c = dgc::parse_config(f.config_path);
  } else if (!f.preset.empty()) {
    c = dgc::preset(f.preset);
  } else {
    throw dgc::ConfigError("one of --config or --preset is required");
  }
  if (kind) c.study.kind = *kind;
  if (!f.method.empty()) c.method = dgc::method_from_string(f.method);
  if (f.theta) c.study.theta = *f.theta;
  if (f.levels) (c.study.kind == dgc::StudyKind::Uniform ? c.study.uniform_levels : c.study.adaptive_levels) = *f.levels;
  if (!f.out.empty()) c.output_directory = f.out;
  dgc::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"DG solver for frictional contact with normal compliance"};
  app.require_subcommand(1);

  CommonFlags uniform_flags, adaptive_flags, estimate_flags;
  std::string solution_path;
  auto* uniform = app.add_subcommand("uniform", "uniform-refinement convergence study");
  add_common(uniform, uniform_flags);
  auto* adaptive = app.add_subcommand("adaptive", "adaptive SOLVE-ESTIMATE-MARK-REFINE loop");
  add_common(adaptive, adaptive_flags);
  auto* estimate = app.add_subcommand("estimate", "evaluate the estimator on a saved solution");
  add_common(estimate, estimate_flags);
  estimate->add_option("--solution", solution_path, "solution.json written by a study")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (uniform->parsed()) return dgc::run(build_config(uniform_flags, dgc::StudyKind::Uniform));
    if (adaptive->parsed()) return dgc::run(build_config(adaptive_flags, dgc::StudyKind::Adaptive));
    return dgc::run_estimate(build_config(estimate_flags, std::nullopt), solution_path);
  } catch (const dgc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    std::cout << dgc::error_json("config", e.what()).dump() << '\n';
    return dgc::kExitConfig;
  }
}
