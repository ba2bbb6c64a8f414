#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dgc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

inline ScalarField constant_field(double value)
{
  return [value](const Vec2&) { return value; };
}

inline VectorField constant_field(const Vec2& value)
{
  return [value](const Vec2&) { return value; };
}

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class NonconvergenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

class SingularMatrixError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Symmetric part of a (v ⊗ n).
inline Mat2 sym_outer(const Vec2& v, const Vec2& n)
{
  Mat2 m = v * n.transpose();
  return 0.5 * (m + m.transpose());
}

inline double frobenius(const Mat2& a, const Mat2& b)
{
  return (a.array() * b.array()).sum();
}

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

namespace quad {

struct Rule1D {
  // Points and weights on [0, 1].
  std::array<double, 4> points{};
  std::array<double, 4> weights{};
  int size = 0;
};

inline constexpr Rule1D gauss2()
{
  Rule1D r;
  const double a = 0.5 - 0.5 / 1.7320508075688772;
  r.points = {a, 1.0 - a, 0.0, 0.0};
  r.weights = {0.5, 0.5, 0.0, 0.0};
  r.size = 2;
  return r;
}

inline constexpr Rule1D gauss4()
{
  Rule1D r;
  const double x1 = 0.3399810435848563, x2 = 0.8611363115940526;
  const double w1 = 0.6521451548625461, w2 = 0.3478548451374538;
  r.points = {0.5 * (1.0 - x2), 0.5 * (1.0 - x1), 0.5 * (1.0 + x1), 0.5 * (1.0 + x2)};
  r.weights = {0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2};
  r.size = 4;
  return r;
}

struct TriPoint {
  std::array<double, 3> bary;
  double weight;  // fraction of the triangle area
};

// Edge-midpoint rule, exact for quadratics.
inline const std::array<TriPoint, 3>& triangle_deg2()
{
  static const std::array<TriPoint, 3> rule{{
      {{0.5, 0.5, 0.0}, 1.0 / 3.0},
      {{0.0, 0.5, 0.5}, 1.0 / 3.0},
      {{0.5, 0.0, 0.5}, 1.0 / 3.0},
  }};
  return rule;
}

// 7-point rule, exact for polynomials of degree 5.
inline const std::array<TriPoint, 7>& triangle_deg5()
{
  static const std::array<TriPoint, 7> rule = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    return std::array<TriPoint, 7>{{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.225},
        {{a1, b1, b1}, w1},
        {{b1, a1, b1}, w1},
        {{b1, b1, a1}, w1},
        {{a2, b2, b2}, w2},
        {{b2, a2, b2}, w2},
        {{b2, b2, a2}, w2},
    }};
  }();
  return rule;
}

}  // namespace quad
}  // namespace dgc
