#pragma once

// Conforming triangulations with labeled boundaries, newest vertex bisection
// and Dörfler marking.
//
// Triangle storage convention: triangle(t) = {v0, v1, v2}, counter-clockwise,
// v0 is the newest vertex and (v1, v2) the refinement edge. Local edge k is
// the edge opposite local vertex k, so local edge 0 is the refinement edge.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "types.hpp"

namespace dgc {

enum class BoundaryLabel : std::uint8_t { Dirichlet, Traction, Contact };

inline std::string to_string(BoundaryLabel label)
{
  switch (label) {
    case BoundaryLabel::Dirichlet: return "dirichlet";
    case BoundaryLabel::Traction: return "traction";
    case BoundaryLabel::Contact: return "contact";
  }
  return "unknown";
}

inline BoundaryLabel boundary_label_from_string(const std::string& s)
{
  if (s == "dirichlet") return BoundaryLabel::Dirichlet;
  if (s == "traction") return BoundaryLabel::Traction;
  if (s == "contact") return BoundaryLabel::Contact;
  throw ConfigError("unknown boundary label '" + s + "'");
}

using VertexPair = std::pair<int, int>;

inline VertexPair ordered_pair(int a, int b) { return a < b ? VertexPair{a, b} : VertexPair{b, a}; }

struct Edge {
  std::array<int, 2> vertices{-1, -1};  // ordered: vertices[0] < vertices[1]
  std::array<int, 2> triangles{-1, -1};  // triangles[1] == -1 on the boundary
  std::array<int, 2> local{-1, -1};  // local edge index inside each triangle
  std::optional<BoundaryLabel> label;  // set exactly on boundary edges

  bool is_boundary() const { return triangles[1] < 0; }
};

class Mesh;
using MeshPtr = std::shared_ptr<const Mesh>;

class Mesh {
 public:
  using Triangle = std::array<int, 3>;

  /// Builds the edge structure and validates orientation, manifoldness and
  /// labeling. `parent` indexes triangles of `parent_mesh` when given.
  Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
       std::map<VertexPair, BoundaryLabel> boundary_labels, std::vector<int> generation = {},
       std::vector<int> parent = {}, MeshPtr parent_mesh = nullptr)
      : vertices_(std::move(vertices)),
        triangles_(std::move(triangles)),
        generation_(std::move(generation)),
        parent_(std::move(parent)),
        parent_mesh_(std::move(parent_mesh))
  {
    if (triangles_.empty()) throw MeshError("mesh has no triangles");
    if (generation_.empty()) generation_.assign(triangles_.size(), 0);
    if (generation_.size() != triangles_.size()) throw MeshError("generation size mismatch");
    if (!parent_.empty() && parent_.size() != triangles_.size()) throw MeshError("parent size mismatch");
    if (!parent_.empty() && !parent_mesh_) throw MeshError("parent indices given without parent mesh");

    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      for (int v : triangles_[t]) {
        if (v < 0 || v >= static_cast<int>(vertices_.size())) throw MeshError("vertex index out of range");
      }
      if (signed_area(static_cast<int>(t)) <= 0.0) {
        throw MeshError("triangle " + std::to_string(t) + " is not positively oriented");
      }
    }
    build_edges(boundary_labels);
  }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Edge ids of triangle t, indexed by local edge (opposite local vertex).
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }

  int generation(int t) const { return generation_[t]; }
  /// Index of t's parent in parent_mesh(), or -1 for an initial mesh.
  int parent(int t) const { return parent_.empty() ? -1 : parent_[t]; }
  const MeshPtr& parent_mesh() const { return parent_mesh_; }

  double signed_area(int t) const
  {
    const auto& tri = triangles_[t];
    return 0.5 * cross2(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
  }
  double area(int t) const { return signed_area(t); }

  /// Local vertex pair (a, b) of local edge k, in counter-clockwise order.
  static std::pair<int, int> local_edge_vertices(int k) { return {(k + 1) % 3, (k + 2) % 3}; }

  double diameter(int t) const
  {
    const auto& tri = triangles_[t];
    double h = 0.0;
    for (int k = 0; k < 3; ++k) h = std::max(h, (vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]]).norm());
    return h;
  }

  double edge_length(int e) const
  {
    const auto& ed = edges_[e];
    return (vertices_[ed.vertices[1]] - vertices_[ed.vertices[0]]).norm();
  }

  Vec2 edge_midpoint(int e) const
  {
    const auto& ed = edges_[e];
    return 0.5 * (vertices_[ed.vertices[0]] + vertices_[ed.vertices[1]]);
  }

  /// Unit normal of edge e pointing out of its side-th triangle.
  Vec2 outward_normal(int e, int side = 0) const
  {
    const auto& ed = edges_[e];
    const int t = ed.triangles[side];
    const auto [la, lb] = local_edge_vertices(ed.local[side]);
    const Vec2 d = vertices_[triangles_[t][lb]] - vertices_[triangles_[t][la]];
    return Vec2(d.y(), -d.x()).normalized();
  }

  bool is_boundary_edge(int e) const { return edges_[e].is_boundary(); }

  std::vector<int> edges_with_label(BoundaryLabel label) const
  {
    std::vector<int> out;
    for (int e = 0; e < num_edges(); ++e) {
      if (edges_[e].label == label) out.push_back(e);
    }
    return out;
  }

  std::vector<int> interior_edges() const
  {
    std::vector<int> out;
    for (int e = 0; e < num_edges(); ++e) {
      if (!edges_[e].is_boundary()) out.push_back(e);
    }
    return out;
  }

  /// Edge set on which jumps are penalized: interior plus Dirichlet edges.
  bool is_penalized_edge(int e) const
  {
    return !edges_[e].is_boundary() || edges_[e].label == BoundaryLabel::Dirichlet;
  }

  /// Edge id for a vertex pair, or -1.
  int find_edge(int a, int b) const
  {
    auto it = edge_index_.find(key(a, b));
    return it == edge_index_.end() ? -1 : it->second;
  }

  /// Boundary labels keyed by ordered vertex pair.
  std::map<VertexPair, BoundaryLabel> boundary_labels() const
  {
    std::map<VertexPair, BoundaryLabel> out;
    for (const auto& ed : edges_) {
      if (ed.label) out.emplace(VertexPair{ed.vertices[0], ed.vertices[1]}, *ed.label);
    }
    return out;
  }

  /// Vertices touching the closure of a labeled boundary part.
  std::vector<bool> vertices_on(BoundaryLabel label) const
  {
    std::vector<bool> on(vertices_.size(), false);
    for (const auto& ed : edges_) {
      if (ed.label == label) on[ed.vertices[0]] = on[ed.vertices[1]] = true;
    }
    return on;
  }

  /// Barycentric coordinates of x with respect to triangle t.
  std::array<double, 3> barycentric(int t, const Vec2& x) const
  {
    const auto& tri = triangles_[t];
    const Vec2& p0 = vertices_[tri[0]];
    const Vec2& p1 = vertices_[tri[1]];
    const Vec2& p2 = vertices_[tri[2]];
    const double twice = cross2(p1 - p0, p2 - p0);
    const double l1 = cross2(x - p0, p2 - p0) / twice;
    const double l2 = cross2(p1 - p0, x - p0) / twice;
    return {1.0 - l1 - l2, l1, l2};
  }

  Vec2 centroid(int t) const
  {
    const auto& tri = triangles_[t];
    return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
  }

 private:
  static std::uint64_t key(int a, int b)
  {
    const auto [lo, hi] = ordered_pair(a, b);
    return (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
  }

  void build_edges(const std::map<VertexPair, BoundaryLabel>& labels)
  {
    triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
    edge_index_.reserve(3 * triangles_.size());
    for (int t = 0; t < num_triangles(); ++t) {
      for (int k = 0; k < 3; ++k) {
        const auto [la, lb] = local_edge_vertices(k);
        const int a = triangles_[t][la], b = triangles_[t][lb];
        auto [it, inserted] = edge_index_.try_emplace(key(a, b), static_cast<int>(edges_.size()));
        if (inserted) {
          Edge ed;
          const auto [lo, hi] = ordered_pair(a, b);
          ed.vertices = {lo, hi};
          ed.triangles[0] = t;
          ed.local[0] = k;
          edges_.push_back(ed);
        } else {
          Edge& ed = edges_[it->second];
          if (ed.triangles[1] >= 0) throw MeshError("edge shared by more than two triangles");
          ed.triangles[1] = t;
          ed.local[1] = k;
        }
        triangle_edges_[t][k] = it->second;
      }
    }
    for (const auto& [pair, label] : labels) {
      const int e = find_edge(pair.first, pair.second);
      if (e < 0) throw MeshError("boundary label on a nonexistent edge");
      if (!edges_[e].is_boundary()) throw MeshError("boundary label on an interior edge");
      edges_[e].label = label;
    }
    for (int e = 0; e < num_edges(); ++e) {
      if (edges_[e].is_boundary() && !edges_[e].label) {
        throw MeshError("boundary edge " + std::to_string(e) + " is unlabeled");
      }
    }
  }

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> generation_;
  std::vector<int> parent_;
  MeshPtr parent_mesh_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::unordered_map<std::uint64_t, int> edge_index_;
};

/// Labels a boundary segment [a, b]; std::nullopt means "not covered".
using BoundaryLabeler = std::function<std::optional<BoundaryLabel>(const Vec2& a, const Vec2& b)>;

enum class RectangleSide { Left, Right, Bottom, Top };

/// Labeler assigning one label per rectangle side.
inline BoundaryLabeler side_labeler(const Vec2& lo, const Vec2& hi, BoundaryLabel left, BoundaryLabel right,
                                    BoundaryLabel bottom, BoundaryLabel top)
{
  const double tol = 1e-12 * std::max(1.0, (hi - lo).norm());
  return [=](const Vec2& a, const Vec2& b) -> std::optional<BoundaryLabel> {
    const Vec2 m = 0.5 * (a + b);
    const bool vertical = std::abs(a.x() - b.x()) <= tol;
    const bool horizontal = std::abs(a.y() - b.y()) <= tol;
    if (vertical && std::abs(m.x() - lo.x()) <= tol) return left;
    if (vertical && std::abs(m.x() - hi.x()) <= tol) return right;
    if (horizontal && std::abs(m.y() - lo.y()) <= tol) return bottom;
    if (horizontal && std::abs(m.y() - hi.y()) <= tol) return top;
    return std::nullopt;
  };
}

/// Rotates each triangle so that its newest vertex is opposite its longest
/// edge (first longest edge wins ties). Orientation is kept.
inline void seed_newest_vertex(const std::vector<Vec2>& vertices, std::vector<Mesh::Triangle>& triangles)
{
  for (auto& tri : triangles) {
    int best = 0;
    double longest = -1.0;
    for (int k = 0; k < 3; ++k) {
      const double len = (vertices[tri[(k + 2) % 3]] - vertices[tri[(k + 1) % 3]]).norm();
      if (len > longest * (1.0 + 1e-12)) {
        longest = len;
        best = k;
      }
    }
    std::rotate(tri.begin(), tri.begin() + best, tri.end());
  }
}

/// Uniform rectangle mesh, n x n cells, each cut by its lower-left to
/// upper-right diagonal (2 n^2 triangles).
inline MeshPtr build_rectangle_mesh(const Vec2& lo, const Vec2& hi, int n, const BoundaryLabeler& labeler)
{
  if (!(lo.x() < hi.x() && lo.y() < hi.y())) throw MeshError("degenerate rectangle");
  if (n < 1) throw MeshError("rectangle mesh needs n >= 1");

  const int stride = n + 1;
  std::vector<Vec2> vertices;
  vertices.reserve(stride * stride);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const double x = i == n ? hi.x() : lo.x() + (hi.x() - lo.x()) * i / n;
      const double y = j == n ? hi.y() : lo.y() + (hi.y() - lo.y()) * j / n;
      vertices.emplace_back(x, y);
    }
  }
  std::vector<Mesh::Triangle> triangles;
  triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = j * stride + i, b = a + 1, c = a + stride + 1, d = a + stride;
      triangles.push_back({a, b, c});
      triangles.push_back({a, c, d});
    }
  }
  seed_newest_vertex(vertices, triangles);

  std::map<VertexPair, BoundaryLabel> labels;
  auto label_segment = [&](int a, int b) {
    const auto label = labeler(vertices[a], vertices[b]);
    if (!label) throw MeshError("labeler leaves a boundary edge unlabeled");
    labels.emplace(ordered_pair(a, b), *label);
  };
  for (int i = 0; i < n; ++i) {
    label_segment(i, i + 1);  // bottom
    label_segment(n * stride + i, n * stride + i + 1);  // top
    label_segment(i * stride, (i + 1) * stride);  // left
    label_segment(i * stride + n, (i + 1) * stride + n);  // right
  }
  return std::make_shared<const Mesh>(std::move(vertices), std::move(triangles), std::move(labels));
}

/// Sorted, duplicate-free set of triangle indices.
struct MarkSet {
  std::vector<int> triangles;

  bool empty() const { return triangles.empty(); }
  std::size_t size() const { return triangles.size(); }
  bool contains(int t) const { return std::binary_search(triangles.begin(), triangles.end(), t); }

  static MarkSet all(const Mesh& mesh)
  {
    MarkSet m;
    m.triangles.resize(mesh.num_triangles());
    std::iota(m.triangles.begin(), m.triangles.end(), 0);
    return m;
  }
};

/// Newest vertex bisection with conforming closure. Every marked triangle is
/// bisected at least once; the returned mesh records its parent mesh. An
/// empty marking returns the input mesh itself.
inline MeshPtr refine_nvb(const MeshPtr& mesh, const MarkSet& marked)
{
  if (marked.empty()) return mesh;
  const Mesh& m = *mesh;
  for (int t : marked.triangles) {
    if (t < 0 || t >= m.num_triangles()) throw MeshError("marked triangle index out of range");
  }

  // Edge marking with closure: a triangle with any marked edge must have its
  // refinement edge marked.
  std::vector<char> edge_marked(m.num_edges(), 0);
  std::vector<int> queue;
  auto mark_edge = [&](int e) {
    if (edge_marked[e]) return;
    edge_marked[e] = 1;
    for (int t : m.edge(e).triangles) {
      if (t >= 0) queue.push_back(t);
    }
  };
  for (int t : marked.triangles) mark_edge(m.triangle_edges(t)[0]);
  while (!queue.empty()) {
    const int t = queue.back();
    queue.pop_back();
    mark_edge(m.triangle_edges(t)[0]);
  }

  std::vector<Vec2> vertices = m.vertices();
  std::vector<int> midpoint(m.num_edges(), -1);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!edge_marked[e]) continue;
    midpoint[e] = static_cast<int>(vertices.size());
    vertices.push_back(m.edge_midpoint(e));
  }

  std::vector<Mesh::Triangle> triangles;
  std::vector<int> generation, parent;
  triangles.reserve(m.num_triangles() * 2);

  // Children's refinement edges are edges of the input mesh, so recursion
  // stops as soon as the refinement edge is new or unmarked.
  auto bisect = [&](auto&& self, const Mesh::Triangle& tri, int origin, int gen) -> void {
    const int e = m.find_edge(tri[1], tri[2]);
    if (e >= 0 && edge_marked[e]) {
      const int mid = midpoint[e];
      self(self, Mesh::Triangle{mid, tri[0], tri[1]}, origin, gen + 1);
      self(self, Mesh::Triangle{mid, tri[2], tri[0]}, origin, gen + 1);
      return;
    }
    triangles.push_back(tri);
    generation.push_back(gen);
    parent.push_back(origin);
  };
  for (int t = 0; t < m.num_triangles(); ++t) bisect(bisect, m.triangle(t), t, m.generation(t));

  std::map<VertexPair, BoundaryLabel> labels;
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& ed = m.edge(e);
    if (!ed.label) continue;
    if (edge_marked[e]) {
      labels.emplace(ordered_pair(ed.vertices[0], midpoint[e]), *ed.label);
      labels.emplace(ordered_pair(midpoint[e], ed.vertices[1]), *ed.label);
    } else {
      labels.emplace(VertexPair{ed.vertices[0], ed.vertices[1]}, *ed.label);
    }
  }
  return std::make_shared<const Mesh>(std::move(vertices), std::move(triangles), std::move(labels),
                                      std::move(generation), std::move(parent), mesh);
}

/// Uniform refinement: every triangle bisected `sweeps` times.
inline MeshPtr refine_uniform(MeshPtr mesh, int sweeps = 1)
{
  for (int s = 0; s < sweeps; ++s) mesh = refine_nvb(mesh, MarkSet::all(*mesh));
  return mesh;
}

/// Minimal-cardinality bulk set: sum of eta_T^2 over the set reaches
/// theta * sum of all eta_T^2. Ties go to the lower triangle index.
inline MarkSet dorfler_mark(const std::vector<double>& indicators, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("Dörfler parameter must lie in (0, 1]");
  for (double eta : indicators) {
    if (!std::isfinite(eta) || eta < 0.0) throw Error("indicators must be finite and nonnegative");
  }
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });

  double total = 0.0;
  for (int t : order) total += indicators[t] * indicators[t];
  if (total <= 0.0) throw Error("all indicators vanish: nothing to refine");

  MarkSet out;
  const double target = theta * total;
  double accumulated = 0.0;
  for (int t : order) {
    out.triangles.push_back(t);
    accumulated += indicators[t] * indicators[t];
    if (accumulated >= target) break;
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  return out;
}

/// Smallest interior angle (radians) over all triangles.
inline double min_angle(const Mesh& mesh)
{
  double best = M_PI;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = mesh.vertex(tri[(k + 1) % 3]) - mesh.vertex(tri[k]);
      const Vec2 b = mesh.vertex(tri[(k + 2) % 3]) - mesh.vertex(tri[k]);
      best = std::min(best, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)));
    }
  }
  return best;
}

}  // namespace dgc
