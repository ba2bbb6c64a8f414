#pragma once

// Run configuration: JSON schema, built-in presets and conversion to the
// library types.

#include <initializer_list>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "afem.hpp"

namespace dgc {

enum class FieldKind { Constant, AffineX, AffineY };

inline std::string to_string(FieldKind k)
{
  switch (k) {
    case FieldKind::Constant: return "constant";
    case FieldKind::AffineX: return "affine_x";
    case FieldKind::AffineY: return "affine_y";
  }
  return "unknown";
}

/// a + b * x (AffineX), a + b * y (AffineY) or a (Constant).
struct ScalarExpr {
  FieldKind kind = FieldKind::Constant;
  double a = 0.0;
  double b = 0.0;

  double operator()(const Vec2& x) const
  {
    switch (kind) {
      case FieldKind::AffineX: return a + b * x.x();
      case FieldKind::AffineY: return a + b * x.y();
      default: return a;
    }
  }
  ScalarField field() const { return *this; }
  bool operator==(const ScalarExpr& o) const { return kind == o.kind && a == o.a && (kind == FieldKind::Constant || b == o.b); }
};

struct VectorExpr {
  FieldKind kind = FieldKind::Constant;
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();

  Vec2 operator()(const Vec2& x) const
  {
    switch (kind) {
      case FieldKind::AffineX: return a + b * x.x();
      case FieldKind::AffineY: return a + b * x.y();
      default: return a;
    }
  }
  VectorField field() const { return *this; }
  bool operator==(const VectorExpr& o) const
  {
    return kind == o.kind && a == o.a && (kind == FieldKind::Constant || b == o.b);
  }
};

enum class StudyKind { Uniform, Adaptive };

inline std::string to_string(StudyKind k) { return k == StudyKind::Uniform ? "uniform" : "adaptive"; }

struct GeometryConfig {
  Vec2 lo = Vec2(0.0, 0.0);
  Vec2 hi = Vec2(1.0, 1.0);
  int n = 2;
  BoundaryLabel left = BoundaryLabel::Traction;
  BoundaryLabel right = BoundaryLabel::Traction;
  BoundaryLabel bottom = BoundaryLabel::Contact;
  BoundaryLabel top = BoundaryLabel::Dirichlet;

  bool operator==(const GeometryConfig& o) const
  {
    return lo == o.lo && hi == o.hi && n == o.n && left == o.left && right == o.right && bottom == o.bottom && top == o.top;
  }
};

struct SolverConfig {
  std::optional<double> rho;
  double tol = 1e-8;
  double lambda_tol = 1e-8;
  int max_outer = 100000;
  double inner_tol = 1e-10;
  int inner_max_iterations = 50;

  bool operator==(const SolverConfig&) const = default;
};

struct StudyConfig {
  StudyKind kind = StudyKind::Uniform;
  int uniform_levels = 6;
  int adaptive_levels = 20;
  double theta = 0.3;
  std::optional<int> max_dof;
  bool warm_start = true;

  bool operator==(const StudyConfig&) const = default;
};

struct RunConfig {
  std::string name = "custom";
  GeometryConfig geometry;
  double young = 1.0;
  double poisson = 0.3;
  VectorExpr f;
  VectorExpr g;
  ScalarExpr c_n;
  ScalarExpr c_tau;
  double m_n = 1.0;
  ScalarExpr g_a;
  MethodKind method = MethodKind::SIPG;
  double penalty = 30.0;
  bool penalty_relative = true;  // penalty is a multiple of mu
  SolverConfig solver;
  StudyConfig study;
  std::string output_directory = "out";

  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------- presets

inline RunConfig preset_example1()
{
  RunConfig c;
  c.name = "example1";
  c.geometry = {Vec2(0.0, 0.05), Vec2(1.0, 1.05), 2, BoundaryLabel::Traction, BoundaryLabel::Dirichlet,
                BoundaryLabel::Contact, BoundaryLabel::Traction};
  c.young = 2000.0;
  c.poisson = 0.4;
  c.g = {FieldKind::AffineY, Vec2(1000.0, -190.0), Vec2(-200.0, 0.0)};  // (200 (5 - y), -190)
  c.c_n = {FieldKind::Constant, 1.0, 0.0};
  c.c_tau = {FieldKind::Constant, 450.0, 0.0};
  c.m_n = 1.0;
  c.g_a = {FieldKind::Constant, 0.05, 0.0};
  c.study.adaptive_levels = 28;
  return c;
}

inline RunConfig preset_example2()
{
  RunConfig c;
  c.name = "example2";
  c.geometry = {Vec2(0.0, 0.0), Vec2(1.0, 1.0), 2, BoundaryLabel::Traction, BoundaryLabel::Traction,
                BoundaryLabel::Contact, BoundaryLabel::Dirichlet};
  c.young = 2500.0;
  c.poisson = 0.2;
  c.g = {FieldKind::Constant, Vec2(880.0, 0.0), Vec2::Zero()};
  c.c_n = {FieldKind::Constant, 1.0, 0.0};
  c.c_tau = {FieldKind::Constant, 250.0, 0.0};
  c.m_n = 1.0;
  c.g_a = {FieldKind::Constant, 0.0, 0.0};
  c.study.adaptive_levels = 23;
  return c;
}

inline RunConfig preset(const std::string& name)
{
  if (name == "example1") return preset_example1();
  if (name == "example2") return preset_example2();
  throw ConfigError("unknown preset '" + name + "' (expected example1 or example2)");
}

// ---------------------------------------------------------------- conversion

inline MaterialParams material(const RunConfig& c) { return MaterialParams::from_young_poisson(c.young, c.poisson); }

inline ProblemData problem_data(const RunConfig& c)
{
  ProblemData d;
  d.mat = material(c);
  d.f = c.f.field();
  d.g = c.g.field();
  d.c_n = c.c_n.field();
  d.c_tau = c.c_tau.field();
  d.m_n = c.m_n;
  d.g_a = c.g_a.field();
  return d;
}

inline MethodVariant method_variant(const RunConfig& c)
{
  return {c.method, c.penalty_relative ? c.penalty * material(c).mu : c.penalty};
}

inline MeshPtr initial_mesh(const RunConfig& c)
{
  const auto& g = c.geometry;
  return build_rectangle_mesh(g.lo, g.hi, g.n, side_labeler(g.lo, g.hi, g.left, g.right, g.bottom, g.top));
}

inline UzawaOptions uzawa_options(const RunConfig& c)
{
  UzawaOptions o;
  o.rho = c.solver.rho;
  o.tol = c.solver.tol;
  o.lambda_tol = c.solver.lambda_tol;
  o.max_outer = c.solver.max_outer;
  o.inner.tol = c.solver.inner_tol;
  o.inner.max_iterations = c.solver.inner_max_iterations;
  return o;
}

/// Throws ConfigError naming the offending field.
inline void validate(const RunConfig& c)
{
  const auto fail = [](const std::string& field, const std::string& msg) { throw ConfigError(field + ": " + msg); };
  const auto& g = c.geometry;
  if (!(g.lo.allFinite() && g.hi.allFinite() && g.lo.x() < g.hi.x() && g.lo.y() < g.hi.y())) {
    fail("geometry", "lo must be below hi in both coordinates");
  }
  if (g.n < 1) fail("geometry.n", "must be >= 1");
  const std::array<BoundaryLabel, 4> sides{g.left, g.right, g.bottom, g.top};
  if (std::find(sides.begin(), sides.end(), BoundaryLabel::Dirichlet) == sides.end()) {
    fail("geometry.boundary", "at least one side must be dirichlet");
  }
  if (!(c.young > 0.0) || !std::isfinite(c.young)) fail("material.E", "must be positive");
  if (!(c.poisson > -1.0 && c.poisson < 0.5)) fail("material.nu", "must lie in (-1, 0.5)");
  if (!(c.m_n >= 1.0) || !std::isfinite(c.m_n)) fail("contact.m_n", "must be >= 1");

  // Affine data attain their extremes at side endpoints.
  const std::array<std::pair<Vec2, Vec2>, 4> ends{{{g.lo, Vec2(g.lo.x(), g.hi.y())},
                                                   {Vec2(g.hi.x(), g.lo.y()), g.hi},
                                                   {g.lo, Vec2(g.hi.x(), g.lo.y())},
                                                   {Vec2(g.lo.x(), g.hi.y()), g.hi}}};
  for (int s = 0; s < 4; ++s) {
    if (sides[s] != BoundaryLabel::Contact) continue;
    for (const Vec2& x : {ends[s].first, ends[s].second}) {
      if (c.c_n(x) < 0.0) fail("contact.c_n", "must be nonnegative on the contact boundary");
      if (c.c_tau(x) < 0.0) fail("contact.c_tau", "must be nonnegative on the contact boundary");
      if (c.g_a(x) < 0.0) fail("contact.g_a", "must be nonnegative on the contact boundary");
    }
  }
  if (!(c.penalty > 0.0) || !std::isfinite(c.penalty)) fail("method.penalty", "must be positive");
  try {
    validate_variant(method_variant(c));
  } catch (const ConfigError& e) {
    fail("method", e.what());
  }
  if (c.solver.rho && !(*c.solver.rho > 0.0)) fail("solver.rho", "must be positive");
  if (!(c.solver.tol > 0.0)) fail("solver.tol", "must be positive");
  if (c.solver.max_outer < 1) fail("solver.max_outer", "must be >= 1");
  if (!(c.solver.inner_tol > 0.0)) fail("solver.inner_tol", "must be positive");
  if (c.solver.inner_max_iterations < 1) fail("solver.inner_max_iterations", "must be >= 1");
  if (c.study.uniform_levels < 2) fail("study.uniform_levels", "must be >= 2");
  if (c.study.adaptive_levels < 1) fail("study.adaptive_levels", "must be >= 1");
  if (!(c.study.theta > 0.0 && c.study.theta <= 1.0)) fail("study.theta", "must lie in (0, 1]");
  if (c.study.max_dof && *c.study.max_dof < 1) fail("study.max_dof", "must be positive");
  if (c.output_directory.empty()) fail("output.directory", "must not be empty");
}

inline StudySettings study_settings(const RunConfig& c)
{
  validate(c);
  StudySettings s;
  s.initial_mesh = initial_mesh(c);
  s.data = problem_data(c);
  s.variant = method_variant(c);
  s.solver = uzawa_options(c);
  s.levels = c.study.kind == StudyKind::Uniform ? c.study.uniform_levels : c.study.adaptive_levels;
  s.theta = c.study.theta;
  s.max_dof = c.study.max_dof;
  s.warm_start = c.study.warm_start;
  return s;
}

// ---------------------------------------------------------------- JSON

namespace config_detail {

using Json = nlohmann::json;

inline void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(path + "." + key + ": unknown key");
  }
}

inline double number(const Json& j, const std::string& path)
{
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
  return v;
}

inline int integer(const Json& j, const std::string& path)
{
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

inline Vec2 vec2(const Json& j, const std::string& path)
{
  if (!j.is_array() || j.size() != 2) throw ConfigError(path + ": expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline std::string string(const Json& j, const std::string& path)
{
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

inline FieldKind field_kind(const Json& j, const std::string& path)
{
  const auto s = string(j, path);
  for (auto k : {FieldKind::Constant, FieldKind::AffineX, FieldKind::AffineY}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError(path + ": unknown field type '" + s + "' (expected constant, affine_x or affine_y)");
}

inline ScalarExpr scalar_expr(const Json& j, const std::string& path)
{
  if (j.is_number()) return {FieldKind::Constant, number(j, path), 0.0};
  check_keys(j, path, {"type", "value", "a", "b"});
  if (!j.contains("type")) throw ConfigError(path + ".type: missing");
  ScalarExpr e;
  e.kind = field_kind(j["type"], path + ".type");
  if (e.kind == FieldKind::Constant) {
    if (!j.contains("value") || j.contains("a") || j.contains("b")) throw ConfigError(path + ": constant takes exactly 'value'");
    e.a = number(j["value"], path + ".value");
  } else {
    if (!j.contains("a") || !j.contains("b") || j.contains("value")) throw ConfigError(path + ": affine field takes 'a' and 'b'");
    e.a = number(j["a"], path + ".a");
    e.b = number(j["b"], path + ".b");
  }
  return e;
}

inline VectorExpr vector_expr(const Json& j, const std::string& path)
{
  if (j.is_array()) return {FieldKind::Constant, vec2(j, path), Vec2::Zero()};
  check_keys(j, path, {"type", "value", "a", "b"});
  if (!j.contains("type")) throw ConfigError(path + ".type: missing");
  VectorExpr e;
  e.kind = field_kind(j["type"], path + ".type");
  if (e.kind == FieldKind::Constant) {
    if (!j.contains("value") || j.contains("a") || j.contains("b")) throw ConfigError(path + ": constant takes exactly 'value'");
    e.a = vec2(j["value"], path + ".value");
  } else {
    if (!j.contains("a") || !j.contains("b") || j.contains("value")) throw ConfigError(path + ": affine field takes 'a' and 'b'");
    e.a = vec2(j["a"], path + ".a");
    e.b = vec2(j["b"], path + ".b");
  }
  return e;
}

inline Json to_json(const ScalarExpr& e)
{
  if (e.kind == FieldKind::Constant) return e.a;
  return {{"type", to_string(e.kind)}, {"a", e.a}, {"b", e.b}};
}

inline Json to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

inline Json to_json(const VectorExpr& e)
{
  if (e.kind == FieldKind::Constant) return to_json(e.a);
  return {{"type", to_string(e.kind)}, {"a", to_json(e.a)}, {"b", to_json(e.b)}};
}

inline BoundaryLabel label(const Json& j, const std::string& path)
{
  try {
    return boundary_label_from_string(string(j, path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace config_detail

/// Parses a config object. A "preset" key selects the base configuration
/// that the remaining sections override field by field.
inline RunConfig config_from_json(const nlohmann::json& j)
{
  using namespace config_detail;
  check_keys(j, "config", {"name", "preset", "geometry", "material", "load", "contact", "method", "solver", "study", "output"});
  RunConfig c;
  if (j.contains("preset")) c = preset(string(j["preset"], "config.preset"));
  if (j.contains("name")) c.name = string(j["name"], "config.name");

  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    check_keys(g, "config.geometry", {"lo", "hi", "n", "boundary"});
    if (g.contains("lo")) c.geometry.lo = vec2(g["lo"], "config.geometry.lo");
    if (g.contains("hi")) c.geometry.hi = vec2(g["hi"], "config.geometry.hi");
    if (g.contains("n")) c.geometry.n = integer(g["n"], "config.geometry.n");
    if (g.contains("boundary")) {
      const auto& b = g["boundary"];
      check_keys(b, "config.geometry.boundary", {"left", "right", "bottom", "top"});
      if (b.contains("left")) c.geometry.left = label(b["left"], "config.geometry.boundary.left");
      if (b.contains("right")) c.geometry.right = label(b["right"], "config.geometry.boundary.right");
      if (b.contains("bottom")) c.geometry.bottom = label(b["bottom"], "config.geometry.boundary.bottom");
      if (b.contains("top")) c.geometry.top = label(b["top"], "config.geometry.boundary.top");
    }
  }
  if (j.contains("material")) {
    const auto& m = j["material"];
    check_keys(m, "config.material", {"E", "nu"});
    if (m.contains("E")) c.young = number(m["E"], "config.material.E");
    if (m.contains("nu")) c.poisson = number(m["nu"], "config.material.nu");
  }
  if (j.contains("load")) {
    const auto& l = j["load"];
    check_keys(l, "config.load", {"f", "g"});
    if (l.contains("f")) c.f = vector_expr(l["f"], "config.load.f");
    if (l.contains("g")) c.g = vector_expr(l["g"], "config.load.g");
  }
  if (j.contains("contact")) {
    const auto& k = j["contact"];
    check_keys(k, "config.contact", {"c_n", "c_tau", "m_n", "g_a"});
    if (k.contains("c_n")) c.c_n = scalar_expr(k["c_n"], "config.contact.c_n");
    if (k.contains("c_tau")) c.c_tau = scalar_expr(k["c_tau"], "config.contact.c_tau");
    if (k.contains("m_n")) c.m_n = number(k["m_n"], "config.contact.m_n");
    if (k.contains("g_a")) c.g_a = scalar_expr(k["g_a"], "config.contact.g_a");
  }
  if (j.contains("method")) {
    const auto& m = j["method"];
    check_keys(m, "config.method", {"kind", "penalty", "penalty_over_mu"});
    if (m.contains("kind")) {
      try {
        c.method = method_from_string(string(m["kind"], "config.method.kind"));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("config.method.kind: ") + e.what());
      }
    }
    if (m.contains("penalty") && m.contains("penalty_over_mu")) {
      throw ConfigError("config.method: give either 'penalty' or 'penalty_over_mu', not both");
    }
    if (m.contains("penalty")) {
      c.penalty = number(m["penalty"], "config.method.penalty");
      c.penalty_relative = false;
    }
    if (m.contains("penalty_over_mu")) {
      c.penalty = number(m["penalty_over_mu"], "config.method.penalty_over_mu");
      c.penalty_relative = true;
    }
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, "config.solver", {"rho", "tol", "lambda_tol", "max_outer", "inner_tol", "inner_max_iterations"});
    if (s.contains("rho")) c.solver.rho = s["rho"].is_null() ? std::nullopt : std::optional<double>(number(s["rho"], "config.solver.rho"));
    if (s.contains("tol")) c.solver.tol = number(s["tol"], "config.solver.tol");
    if (s.contains("lambda_tol")) c.solver.lambda_tol = number(s["lambda_tol"], "config.solver.lambda_tol");
    if (s.contains("max_outer")) c.solver.max_outer = integer(s["max_outer"], "config.solver.max_outer");
    if (s.contains("inner_tol")) c.solver.inner_tol = number(s["inner_tol"], "config.solver.inner_tol");
    if (s.contains("inner_max_iterations")) {
      c.solver.inner_max_iterations = integer(s["inner_max_iterations"], "config.solver.inner_max_iterations");
    }
  }
  if (j.contains("study")) {
    const auto& s = j["study"];
    check_keys(s, "config.study", {"kind", "uniform_levels", "adaptive_levels", "theta", "max_dof", "warm_start"});
    if (s.contains("kind")) {
      const auto k = string(s["kind"], "config.study.kind");
      if (k == "uniform") {
        c.study.kind = StudyKind::Uniform;
      } else if (k == "adaptive") {
        c.study.kind = StudyKind::Adaptive;
      } else {
        throw ConfigError("config.study.kind: expected 'uniform' or 'adaptive'");
      }
    }
    if (s.contains("uniform_levels")) c.study.uniform_levels = integer(s["uniform_levels"], "config.study.uniform_levels");
    if (s.contains("adaptive_levels")) c.study.adaptive_levels = integer(s["adaptive_levels"], "config.study.adaptive_levels");
    if (s.contains("theta")) c.study.theta = number(s["theta"], "config.study.theta");
    if (s.contains("max_dof")) {
      c.study.max_dof = s["max_dof"].is_null() ? std::nullopt : std::optional<int>(integer(s["max_dof"], "config.study.max_dof"));
    }
    if (s.contains("warm_start")) {
      if (!s["warm_start"].is_boolean()) throw ConfigError("config.study.warm_start: expected a boolean");
      c.study.warm_start = s["warm_start"].get<bool>();
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "config.output", {"directory"});
    if (o.contains("directory")) c.output_directory = string(o["directory"], "config.output.directory");
  }
  validate(c);
  return c;
}

inline RunConfig parse_config_text(const std::string& text)
{
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ConfigError("config: file is empty");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

/// Full, preset-free form of the configuration.
inline nlohmann::json config_to_json(const RunConfig& c)
{
  using namespace config_detail;
  Json j;
  j["name"] = c.name;
  j["geometry"] = {{"lo", to_json(c.geometry.lo)},
                   {"hi", to_json(c.geometry.hi)},
                   {"n", c.geometry.n},
                   {"boundary",
                    {{"left", to_string(c.geometry.left)},
                     {"right", to_string(c.geometry.right)},
                     {"bottom", to_string(c.geometry.bottom)},
                     {"top", to_string(c.geometry.top)}}}};
  j["material"] = {{"E", c.young}, {"nu", c.poisson}};
  j["load"] = {{"f", to_json(c.f)}, {"g", to_json(c.g)}};
  j["contact"] = {{"c_n", to_json(c.c_n)}, {"c_tau", to_json(c.c_tau)}, {"m_n", c.m_n}, {"g_a", to_json(c.g_a)}};
  j["method"] = {{"kind", to_string(c.method)}, {c.penalty_relative ? "penalty_over_mu" : "penalty", c.penalty}};
  j["solver"] = {{"rho", c.solver.rho ? Json(*c.solver.rho) : Json(nullptr)},
                 {"tol", c.solver.tol},
                 {"lambda_tol", c.solver.lambda_tol},
                 {"max_outer", c.solver.max_outer},
                 {"inner_tol", c.solver.inner_tol},
                 {"inner_max_iterations", c.solver.inner_max_iterations}};
  j["study"] = {{"kind", to_string(c.study.kind)},
                {"uniform_levels", c.study.uniform_levels},
                {"adaptive_levels", c.study.adaptive_levels},
                {"theta", c.study.theta},
                {"max_dof", c.study.max_dof ? Json(*c.study.max_dof) : Json(nullptr)},
                {"warm_start", c.study.warm_start}};
  j["output"] = {{"directory", c.output_directory}};
  return j;
}

}  // namespace dgc
