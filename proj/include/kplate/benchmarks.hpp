#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kplate/estimator.hpp"
#include "kplate/mesh.hpp"

namespace kplate {

struct BenchmarkCase {
  std::string name;
  std::function<Mesh(int n, const BoundarySpec&)> make_mesh;
  BoundarySpec spec;
  ScalarFunction f;
  std::optional<ExactSolution> exact;
  std::optional<Vec2> singular;  // where f and the exact Hessian may blow up
  double alpha0 = 1.0;           // penalty alpha = alpha0 (k+1)^2

  Mesh mesh(int n) const { return make_mesh(n, spec); }
};

/// Exponent of the corner singularity on the L-shaped domain and the opening angle.
inline constexpr double kLShapeExponent = 0.5444837;
inline constexpr double kLShapeAngle = 1.5 * 3.14159265358979323846;

/// Clamped L-shape with u = (x^2-1)^2 (y^2-1)^2 r^{1+z} g(phi).
BenchmarkCase lshape_singular_case();
/// Clamped unit square with u = sin^2(pi x) sin^2(pi y).
BenchmarkCase smooth_manufactured_case();
/// Unit square, f = 1: simply supported at x = 0 and x = 1, clamped at y = 0,
/// free at y = 1. The reference solution is a Levy series.
BenchmarkCase timoshenko_mixed_case();

BenchmarkCase benchmark_by_name(const std::string& name);

/// Levy-series solution of the mixed-boundary plate; terms with odd m <= max_m.
ExactSolution timoshenko_series(int max_m = 399);

}  // namespace kplate
