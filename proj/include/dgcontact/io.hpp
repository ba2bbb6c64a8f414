#pragma once

// File output: RFC-4180 CSV, legacy ASCII VTK, MatrixMarket and JSON.
// Every writer goes through write_atomic.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "afem.hpp"

namespace dgc {

using Json = nlohmann::json;

class IoError : public Error {
 public:
  using Error::Error;
};

/// Writes to a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Shortest decimal text that round-trips a double.
inline std::string format_double(double v)
{
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// ---------------------------------------------------------------- CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row)
  {
    if (row.size() != header.size()) throw IoError("CSV row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline std::string csv_escape(const std::string& field)
{
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const CsvTable& table)
{
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(fields[i]);
    }
    out += "\r\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

/// Parser for the subset written by to_csv (quoted fields, CRLF or LF).
inline CsvTable parse_csv(const std::string& text)
{
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw IoError("empty CSV");
  CsvTable t;
  t.header = records.front();
  for (std::size_t i = 1; i < records.size(); ++i) t.add_row(records[i]);
  return t;
}

inline std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

/// Columns h, error, order for the rows that carry an error.
inline CsvTable uniform_table(const std::vector<StudyRecord>& records)
{
  CsvTable t{{"h", "error", "order"}, {}};
  for (const auto& r : records) {
    if (r.error) t.add_row({format_double(r.h), format_double(*r.error), optional_cell(r.order)});
  }
  return t;
}

inline CsvTable adaptive_table(const std::vector<StudyRecord>& records)
{
  CsvTable t{{"level", "dofs", "eta", "outer_iterations", "solve_seconds"}, {}};
  for (const auto& r : records) {
    t.add_row({std::to_string(r.level), std::to_string(r.dofs), format_double(r.eta),
               std::to_string(r.outer_iterations), format_double(r.solve_seconds)});
  }
  return t;
}

inline CsvTable estimator_table(const EstimatorBreakdown& b)
{
  CsvTable t{{"triangle", "eta_T", "eta1_sq", "eta2_sq", "eta3_sq", "eta4_sq", "eta5_sq", "eta6_sq"}, {}};
  const auto eta_t = per_element_indicators(b);
  for (std::size_t i = 0; i < b.element_terms.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), format_double(eta_t[i])};
    for (double v : b.element_terms[i]) row.push_back(format_double(v));
    t.add_row(std::move(row));
  }
  return t;
}

inline CsvTable trace_table(const SolveReport& report)
{
  CsvTable t{{"iteration", "increment", "residual"}, {}};
  for (const auto& r : report.trace) {
    t.add_row({std::to_string(r.iteration), format_double(r.increment), format_double(r.residual)});
  }
  return t;
}

// ---------------------------------------------------------------- VTK

/// Unstructured grid with one VTK_TRIANGLE (type 5) per triangle.
inline std::string mesh_to_vtk(const Mesh& mesh, const std::map<std::string, std::vector<double>>& cell_data = {},
                               const std::string& title = "dgcontact mesh")
{
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) os << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
  os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
  if (!cell_data.empty()) {
    os << "CELL_DATA " << mesh.num_triangles() << '\n';
    for (const auto& [name, values] : cell_data) {
      if (static_cast<int>(values.size()) != mesh.num_triangles()) throw IoError("cell data '" + name + "' has the wrong length");
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : values) os << format_double(v) << '\n';
    }
  }
  return os.str();
}

/// Discontinuous displacement: vertices are duplicated per triangle so the
/// point data can carry both traces.
inline std::string solution_to_vtk(const DGFunction& u, const std::map<std::string, std::vector<double>>& cell_data = {})
{
  const Mesh& mesh = *u.mesh();
  const int nt = mesh.num_triangles();
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\ndgcontact displacement\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << 3 * nt << " double\n";
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const Vec2& v = mesh.vertex(mesh.triangle(t)[k]);
      os << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
    }
  }
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (int t = 0; t < nt; ++t) os << "3 " << 3 * t << ' ' << 3 * t + 1 << ' ' << 3 * t + 2 << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) os << "5\n";
  os << "POINT_DATA " << 3 * nt << "\nVECTORS displacement double\n";
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const Vec2 v = u.vertex_value(t, k);
      os << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
    }
  }
  if (!cell_data.empty()) {
    os << "CELL_DATA " << nt << '\n';
    for (const auto& [name, values] : cell_data) {
      if (static_cast<int>(values.size()) != nt) throw IoError("cell data '" + name + "' has the wrong length");
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : values) os << format_double(v) << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- MatrixMarket

inline std::string to_matrix_market(const SparseMatrix& A)
{
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- JSON

inline Json to_json(const SolveReport& r)
{
  Json trace = Json::array();
  for (const auto& row : r.trace) {
    trace.push_back({{"iteration", row.iteration}, {"increment", row.increment}, {"residual", row.residual},
                     {"inner_iterations", row.inner_iterations}});
  }
  return {{"converged", r.converged},
          {"outer_iterations", r.outer_iterations},
          {"inner_iterations", r.inner_iterations},
          {"final_increment", r.final_increment},
          {"residual_norms", r.residual_norms},
          {"wall_time_seconds", r.wall_time_seconds},
          {"rho", r.rho},
          {"max_multiplier", r.max_multiplier},
          {"lambda_increment", r.lambda_increment},
          {"factorizations", r.factorizations},
          {"trace", trace}};
}

inline Json to_json(const EstimatorBreakdown& b)
{
  return {{"eta", b.eta}, {"total", b.total}};
}

inline Json to_json(const OscillationReport& o)
{
  return {{"f", o.f}, {"g", o.g}, {"c_tau", o.c_tau}, {"lambda_tau", o.lambda_tau ? Json(*o.lambda_tau) : Json("not available")}};
}

inline Json to_json(const StudyRecord& r)
{
  Json j{{"level", r.level}, {"h", r.h}, {"dofs", r.dofs}, {"eta", r.eta},
         {"outer_iterations", r.outer_iterations}, {"solve_seconds", r.solve_seconds}};
  j["error"] = r.error ? Json(*r.error) : Json(nullptr);
  j["order"] = r.order ? Json(*r.order) : Json(nullptr);
  return j;
}

/// Mesh, coefficients and multiplier, enough to rerun the estimator.
inline Json solution_to_json(const DGFunction& u, const FrictionMultiplier& lambda)
{
  const Mesh& mesh = *u.mesh();
  Json vertices = Json::array(), triangles = Json::array(), boundary = Json::array(), lam = Json::array();
  for (const auto& v : mesh.vertices()) vertices.push_back({v.x(), v.y()});
  for (const auto& t : mesh.triangles()) triangles.push_back({t[0], t[1], t[2]});
  for (const auto& [pair, label] : mesh.boundary_labels()) boundary.push_back({pair.first, pair.second, to_string(label)});
  for (const auto& l : lambda.values) lam.push_back({l.x(), l.y()});
  return {{"vertices", vertices},
          {"triangles", triangles},
          {"boundary", boundary},
          {"u", std::vector<double>(u.coeffs().data(), u.coeffs().data() + u.size())},
          {"lambda", lam}};
}

struct SavedSolution {
  MeshPtr mesh;
  DGFunction u;
  FrictionMultiplier lambda;
};

inline SavedSolution solution_from_json(const Json& j)
{
  try {
    std::vector<Vec2> vertices;
    for (const auto& v : j.at("vertices")) vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    std::vector<Mesh::Triangle> triangles;
    for (const auto& t : j.at("triangles")) triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    std::map<VertexPair, BoundaryLabel> labels;
    for (const auto& b : j.at("boundary")) {
      labels.emplace(ordered_pair(b.at(0).get<int>(), b.at(1).get<int>()), boundary_label_from_string(b.at(2).get<std::string>()));
    }
    auto mesh = std::make_shared<const Mesh>(std::move(vertices), std::move(triangles), std::move(labels));
    const auto coeffs = j.at("u").get<std::vector<double>>();
    DGFunction u(mesh, Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size())));
    FrictionMultiplier lambda;
    for (const auto& l : j.at("lambda")) lambda.values.emplace_back(l.at(0).get<double>(), l.at(1).get<double>());
    return {mesh, std::move(u), std::move(lambda)};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed solution file: ") + e.what());
  }
}

}  // namespace dgc
