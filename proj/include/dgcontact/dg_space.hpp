#pragma once

// Piecewise-linear, fully discontinuous vector fields and their trace
// operators.
//
// DOF layout is triangle-major, vertex-minor, component-innermost:
//   dof(t, k, c) = 6 t + 2 k + c
// where k is the local vertex of triangle t and c the displacement component.

#include <algorithm>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mesh.hpp"

namespace dgc {

constexpr int kDofsPerTriangle = 6;

inline int dof_index(int t, int k, int c) { return kDofsPerTriangle * t + 2 * k + c; }

struct MaterialParams {
  double E = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
  double mu = 0.0;

  static MaterialParams from_young_poisson(double E, double nu)
  {
    if (!(E > 0.0) || !(nu > -1.0 && nu < 0.5)) throw ConfigError("need E > 0 and -1 < nu < 1/2");
    MaterialParams m;
    m.E = E;
    m.nu = nu;
    m.mu = E / (2.0 * (1.0 + nu));
    m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    if (!(m.lambda > 0.0)) throw ConfigError("Lamé coefficient lambda must be positive (nu > 0)");
    return m;
  }

  static MaterialParams from_lame(double lambda, double mu)
  {
    if (!(lambda > 0.0 && mu > 0.0)) throw ConfigError("Lamé coefficients must be positive");
    MaterialParams m;
    m.lambda = lambda;
    m.mu = mu;
    m.E = mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
    m.nu = lambda / (2.0 * (lambda + mu));
    return m;
  }
};

/// Isotropic Hooke law: lambda tr(eps) I + 2 mu eps.
inline Mat2 stress(const Mat2& eps, const MaterialParams& mat)
{
  return mat.lambda * eps.trace() * Mat2::Identity() + 2.0 * mat.mu * eps;
}

/// Gradients of the barycentric coordinates of triangle t.
inline std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int t)
{
  const auto& tri = mesh.triangle(t);
  const double twice = 2.0 * mesh.area(t);
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Vec2& p1 = mesh.vertex(tri[(k + 1) % 3]);
    const Vec2& p2 = mesh.vertex(tri[(k + 2) % 3]);
    g[k] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / twice;
  }
  return g;
}

/// Symmetric gradient of the basis function lambda_k e_c on its triangle.
inline Mat2 basis_strain(const std::array<Vec2, 3>& grads, int k, int c)
{
  return sym_outer(Vec2::Unit(c), grads[k]);
}

class DGFunction {
 public:
  explicit DGFunction(MeshPtr mesh)
      : mesh_(std::move(mesh)), coeffs_(Eigen::VectorXd::Zero(kDofsPerTriangle * mesh_->num_triangles()))
  {
  }

  DGFunction(MeshPtr mesh, Eigen::VectorXd coeffs) : mesh_(std::move(mesh)), coeffs_(std::move(coeffs))
  {
    if (coeffs_.size() != kDofsPerTriangle * mesh_->num_triangles()) {
      throw Error("DGFunction coefficient count must be 6 x #triangles");
    }
  }

  /// Interpolates a field at the vertices of every triangle.
  static DGFunction interpolate(MeshPtr mesh, const VectorField& field)
  {
    DGFunction v(mesh);
    for (int t = 0; t < mesh->num_triangles(); ++t) {
      for (int k = 0; k < 3; ++k) v.set_vertex_value(t, k, field(mesh->vertex(mesh->triangle(t)[k])));
    }
    return v;
  }

  const MeshPtr& mesh() const { return mesh_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  Vec2 vertex_value(int t, int k) const { return {coeffs_[dof_index(t, k, 0)], coeffs_[dof_index(t, k, 1)]}; }

  void set_vertex_value(int t, int k, const Vec2& value)
  {
    coeffs_[dof_index(t, k, 0)] = value.x();
    coeffs_[dof_index(t, k, 1)] = value.y();
  }

  Vec2 value(int t, const std::array<double, 3>& bary) const
  {
    return bary[0] * vertex_value(t, 0) + bary[1] * vertex_value(t, 1) + bary[2] * vertex_value(t, 2);
  }

  Vec2 value(int t, const Vec2& x) const { return value(t, mesh_->barycentric(t, x)); }

  /// (i, j) entry is d v_i / d x_j on triangle t.
  Mat2 gradient(int t) const
  {
    const auto g = barycentric_gradients(*mesh_, t);
    Mat2 grad = Mat2::Zero();
    for (int k = 0; k < 3; ++k) grad += vertex_value(t, k) * g[k].transpose();
    return grad;
  }

 private:
  MeshPtr mesh_;
  Eigen::VectorXd coeffs_;
};

inline Mat2 strain(const DGFunction& v, int t)
{
  const Mat2 g = v.gradient(t);
  return 0.5 * (g + g.transpose());
}

/// Per-triangle constant 2x2 tensors.
using TensorField2x2 = std::vector<Mat2>;

inline TensorField2x2 stress_field(const DGFunction& v, const MaterialParams& mat)
{
  TensorField2x2 out(v.mesh()->num_triangles());
  for (int t = 0; t < v.mesh()->num_triangles(); ++t) out[t] = stress(strain(v, t), mat);
  return out;
}

/// Point on edge e at parameter s in [0, 1], from vertices[0] to vertices[1].
inline Vec2 edge_point(const Mesh& mesh, int e, double s)
{
  const Edge& ed = mesh.edge(e);
  return (1.0 - s) * mesh.vertex(ed.vertices[0]) + s * mesh.vertex(ed.vertices[1]);
}

/// Symmetrized vector jump at x on edge e.
inline Mat2 jump_vector(const DGFunction& v, int e, const Vec2& x)
{
  const Mesh& mesh = *v.mesh();
  const Edge& ed = mesh.edge(e);
  Mat2 jump = sym_outer(v.value(ed.triangles[0], x), mesh.outward_normal(e, 0));
  if (!ed.is_boundary()) jump += sym_outer(v.value(ed.triangles[1], x), mesh.outward_normal(e, 1));
  return jump;
}

/// Weight of side `side` in the edge average: 1/2 inside, 1 on the boundary.
inline double average_weight(const Mesh& mesh, int e) { return mesh.is_boundary_edge(e) ? 1.0 : 0.5; }

inline Mat2 average_tensor(const TensorField2x2& phi, const Mesh& mesh, int e)
{
  const Edge& ed = mesh.edge(e);
  if (ed.is_boundary()) return phi[ed.triangles[0]];
  return 0.5 * (phi[ed.triangles[0]] + phi[ed.triangles[1]]);
}

inline Vec2 jump_tensor(const TensorField2x2& phi, const Mesh& mesh, int e)
{
  const Edge& ed = mesh.edge(e);
  Vec2 jump = phi[ed.triangles[0]] * mesh.outward_normal(e, 0);
  if (!ed.is_boundary()) jump += phi[ed.triangles[1]] * mesh.outward_normal(e, 1);
  return jump;
}

/// Target space of the lifting operators.
enum class LiftingSpace { Constant, Linear };

/// Average weight over |T|: r_e(q)|_T = -c_T * integral_e q ds for the
/// lifting into piecewise constant tensors.
inline double lifting_factor(const Mesh& mesh, int e, int side)
{
  return average_weight(mesh, e) / mesh.area(mesh.edge(e).triangles[side]);
}

/// Inverse of the P1 mass matrix on a triangle of unit area.
inline const Eigen::Matrix3d& p1_inverse_mass_unit()
{
  static const Eigen::Matrix3d m = [] {
    Eigen::Matrix3d x;
    x << 9, -3, -3, -3, 9, -3, -3, -3, 9;
    return x;
  }();
  return m;
}

/// Symmetric tensor field, linear (or constant) per triangle, stored by its
/// values at the three triangle vertices.
struct LiftedTensor {
  std::vector<std::array<Mat2, 3>> nodal;

  Mat2 value(int t, const std::array<double, 3>& bary) const
  {
    return bary[0] * nodal[t][0] + bary[1] * nodal[t][1] + bary[2] * nodal[t][2];
  }
};

/// Moments w * integral_e q * lambda_l ds against the barycentric functions
/// of the triangle on `side`; q is symmetrized.
inline std::array<Mat2, 3> lifting_moments(const Mesh& mesh, int e, int side,
                                           const std::function<Mat2(const Vec2&)>& q)
{
  const auto rule = quad::gauss2();
  const int t = mesh.edge(e).triangles[side];
  const double scale = average_weight(mesh, e) * mesh.edge_length(e);
  std::array<Mat2, 3> b{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
  for (int i = 0; i < rule.size; ++i) {
    const Vec2 x = edge_point(mesh, e, rule.points[i]);
    Mat2 qx = q(x);
    qx = 0.5 * (qx + qx.transpose());
    const auto bary = mesh.barycentric(t, x);
    for (int l = 0; l < 3; ++l) b[l] += scale * rule.weights[i] * bary[l] * qx;
  }
  return b;
}

/// Local lifting r_e(q): the symmetric tensor field in the chosen space with
/// integral r_e(q) : tau = -integral_e q : {{tau}} for every tau in that space;
/// zero outside the triangles adjacent to e.
inline LiftedTensor local_lifting(const Mesh& mesh, int e, const std::function<Mat2(const Vec2&)>& q,
                                  LiftingSpace space = LiftingSpace::Linear)
{
  if (!mesh.is_penalized_edge(e)) throw Error("lifting is defined on interior and Dirichlet edges only");
  LiftedTensor out{std::vector<std::array<Mat2, 3>>(mesh.num_triangles(), {Mat2::Zero(), Mat2::Zero(), Mat2::Zero()})};
  const Edge& ed = mesh.edge(e);
  for (int side = 0; side < (ed.is_boundary() ? 1 : 2); ++side) {
    const int t = ed.triangles[side];
    const auto b = lifting_moments(mesh, e, side, q);
    if (space == LiftingSpace::Constant) {
      const Mat2 r = -(b[0] + b[1] + b[2]) / mesh.area(t);
      out.nodal[t] = {r, r, r};
    } else {
      const Eigen::Matrix3d minv = p1_inverse_mass_unit() / mesh.area(t);
      for (int k = 0; k < 3; ++k) {
        Mat2 r = Mat2::Zero();
        for (int l = 0; l < 3; ++l) r -= minv(k, l) * b[l];
        out.nodal[t][k] = r;
      }
    }
  }
  return out;
}

/// Integral of |[[v]]|^2 (Frobenius) over edge e, exact for P1.
inline double jump_l2_squared(const DGFunction& v, int e)
{
  // The jump is affine along e: integrate exactly from its endpoint values,
  // taken from vertex coefficients so continuous traces cancel exactly.
  const Mesh& mesh = *v.mesh();
  const Edge& ed = mesh.edge(e);
  std::array<Mat2, 2> j{Mat2::Zero(), Mat2::Zero()};
  const int sides = ed.is_boundary() ? 1 : 2;
  for (int side = 0; side < sides; ++side) {
    const int t = ed.triangles[side];
    const Vec2 n = mesh.outward_normal(e, side);
    for (int end = 0; end < 2; ++end) {
      const auto& tri = mesh.triangle(t);
      const int k = static_cast<int>(std::find(tri.begin(), tri.end(), ed.vertices[end]) - tri.begin());
      j[end] += sym_outer(v.vertex_value(t, k), n);
    }
  }
  return mesh.edge_length(e) / 3.0 * (frobenius(j[0], j[0]) + frobenius(j[0], j[1]) + frobenius(j[1], j[1]));
}

struct DGNorm {
  double energy_sq = 0.0;  // sum_T  int_T C eps(v) : eps(v)
  double jump_sq = 0.0;  // sum over interior and Dirichlet edges of h_e^{-1} |[[v]]|^2_{0,e}

  double energy() const { return std::sqrt(energy_sq); }
  double jump() const { return std::sqrt(jump_sq); }
  double value() const { return std::sqrt(energy_sq + jump_sq); }
};

inline DGNorm dg_norm(const DGFunction& v, const MaterialParams& mat)
{
  const Mesh& mesh = *v.mesh();
  DGNorm n;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Mat2 eps = strain(v, t);
    n.energy_sq += mesh.area(t) * frobenius(stress(eps, mat), eps);
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_penalized_edge(e)) n.jump_sq += jump_l2_squared(v, e) / mesh.edge_length(e);
  }
  return n;
}

/// Continuous piecewise-linear field given by nodal values.
struct ContinuousField {
  MeshPtr mesh;
  std::vector<Vec2> nodal;

  DGFunction to_dg() const
  {
    DGFunction v(mesh);
    for (int t = 0; t < mesh->num_triangles(); ++t) {
      for (int k = 0; k < 3; ++k) v.set_vertex_value(t, k, nodal[mesh->triangle(t)[k]]);
    }
    return v;
  }
};

/// Enriching operator: nodal averaging over the vertex patch, zero at
/// vertices on the closure of the Dirichlet boundary.
inline ContinuousField enrich(const DGFunction& v)
{
  const Mesh& mesh = *v.mesh();
  ContinuousField out{v.mesh(), std::vector<Vec2>(mesh.num_vertices(), Vec2::Zero())};
  std::vector<int> count(mesh.num_vertices(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int p = mesh.triangle(t)[k];
      out.nodal[p] += v.vertex_value(t, k);
      ++count[p];
    }
  }
  const auto dirichlet = mesh.vertices_on(BoundaryLabel::Dirichlet);
  for (int p = 0; p < mesh.num_vertices(); ++p) {
    out.nodal[p] = (dirichlet[p] || count[p] == 0) ? Vec2::Zero() : Vec2(out.nodal[p] / count[p]);
  }
  return out;
}

/// Exact L2 norm squared of a P1 field over triangle t given vertex values.
inline double p1_l2_squared(double area, const std::array<Vec2, 3>& values)
{
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < 3; ++i) {
    diag += values[i].squaredNorm();
    for (int j = i + 1; j < 3; ++j) off += values[i].dot(values[j]);
  }
  return area / 6.0 * (diag + off);
}

/// Maps each triangle of `fine` to its ancestor in `coarse`.
inline std::vector<int> ancestor_map(const MeshPtr& coarse, const MeshPtr& fine)
{
  std::vector<int> map(fine->num_triangles());
  for (int t = 0; t < fine->num_triangles(); ++t) map[t] = t;
  const Mesh* current = fine.get();
  while (current != coarse.get()) {
    if (!current->parent_mesh()) throw Error("meshes are not nested");
    for (int& t : map) t = current->parent(t);
    current = current->parent_mesh().get();
  }
  return map;
}

/// Exact representation of a coarse DG field on a descendant mesh.
inline DGFunction embed(const DGFunction& v, const MeshPtr& fine)
{
  const auto map = ancestor_map(v.mesh(), fine);
  DGFunction out(fine);
  for (int t = 0; t < fine->num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) out.set_vertex_value(t, k, v.value(map[t], fine->vertex(fine->triangle(t)[k])));
  }
  return out;
}

}  // namespace dgc
