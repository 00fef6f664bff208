#pragma once

#include <optional>
#include <vector>

#include "kplate/mesh.hpp"

namespace kplate {

/// Quadrature rule on the reference triangle {x, y >= 0, x + y <= 1}
/// (weights sum to 1/2) or on the reference interval [0, 1] (weights sum to 1).
/// For edge rules only the first coordinate of each point is used.
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;
  std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxQuadratureDegree = 20;

/// Gauss-Legendre nodes and weights on [0, 1].
QuadRule gauss_legendre(int npoints);
/// Gauss-Jacobi nodes and weights on [0, 1] for the weight function x.
QuadRule gauss_jacobi_x(int npoints);

/// Collapsed (conical product) rule exact for total degree <= d.
const QuadRule& triangle_rule(int d);
/// Gauss-Legendre rule exact for degree <= d.
const QuadRule& edge_rule(int d);

/// Physical quadrature point with weight already scaled by the Jacobian.
struct WeightedPoint {
  Vec2 x;
  double w;
};

/// Quadrature on the physical triangle (a, b, c). When `singular` coincides with
/// a vertex, a rule graded geometrically toward that vertex is used, which
/// integrates r^beta-type singularities accurately.
std::vector<WeightedPoint> triangle_points(const Vec2& a, const Vec2& b, const Vec2& c, int degree,
                                           const std::optional<Vec2>& singular = std::nullopt);

/// Quadrature on element t of the mesh.
std::vector<WeightedPoint> element_points(const Mesh& mesh, int t, int degree,
                                          const std::optional<Vec2>& singular = std::nullopt);

}  // namespace kplate
