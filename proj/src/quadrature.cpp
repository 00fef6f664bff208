#include "kplate/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace kplate {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1], mapped
// to [0, 1].
QuadRule golub_welsch_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one point");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int i = 0; i < n; ++i) {
    const double denom = (2.0 * i + ab) * (2.0 * i + ab + 2.0);
    J(i, i) = (i == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / denom;
  }
  for (int i = 1; i < n; ++i) {
    const double k = i;
    const double s = 2.0 * k + ab;
    const double b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    J(i, i - 1) = J(i - 1, i) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(ab + 2.0);
  // Weight (1-x)^alpha (1+x)^beta dx on [-1,1] becomes 2^(ab+1) (1-s)^alpha s^beta ds.
  const double scale = std::pow(2.0, -(ab + 1.0));
  QuadRule rule;
  for (int i = 0; i < n; ++i) {
    const double x = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.points.emplace_back(0.5 * (x + 1.0), 0.0);
    rule.weights.push_back(mu0 * v0 * v0 * scale);
  }
  return rule;
}

void check_degree(int d) {
  if (d < 0 || d > kMaxQuadratureDegree)
    throw std::out_of_range("quadrature degree " + std::to_string(d) + " outside [0, " +
                            std::to_string(kMaxQuadratureDegree) + "]");
}

QuadRule build_triangle_rule(int d) {
  const int n = (d + 2) / 2;  // 2n - 1 >= d
  const QuadRule radial = gauss_jacobi_x(n);
  const QuadRule angular = gauss_legendre(n);
  QuadRule rule;
  rule.degree = d;
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double a = radial.points[i].x();
    for (std::size_t j = 0; j < angular.size(); ++j) {
      const double b = angular.points[j].x();
      rule.points.emplace_back(a * (1.0 - b), a * b);
      rule.weights.push_back(radial.weights[i] * angular.weights[j]);
    }
  }
  return rule;
}

}  // namespace

QuadRule gauss_legendre(int npoints) { return golub_welsch_jacobi(npoints, 0.0, 0.0); }

QuadRule gauss_jacobi_x(int npoints) { return golub_welsch_jacobi(npoints, 0.0, 1.0); }

const QuadRule& triangle_rule(int d) {
  check_degree(d);
  static std::array<QuadRule, kMaxQuadratureDegree + 1> cache;
  static std::once_flag flag;
  std::call_once(flag, [] {
    for (int k = 0; k <= kMaxQuadratureDegree; ++k) cache[k] = build_triangle_rule(k);
  });
  return cache[d];
}

const QuadRule& edge_rule(int d) {
  check_degree(d);
  static std::array<QuadRule, kMaxQuadratureDegree + 1> cache;
  static std::once_flag flag;
  std::call_once(flag, [] {
    for (int k = 0; k <= kMaxQuadratureDegree; ++k) {
      cache[k] = gauss_legendre((k + 2) / 2);
      cache[k].degree = k;
    }
  });
  return cache[d];
}

std::vector<WeightedPoint> triangle_points(const Vec2& a, const Vec2& b, const Vec2& c, int degree,
                                           const std::optional<Vec2>& singular) {
  const Vec2 p[3] = {a, b, c};
  int corner = -1;
  if (singular) {
    const double h = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    for (int i = 0; i < 3; ++i) {
      if ((p[i] - *singular).norm() < 1e-12 * h) corner = i;
    }
  }
  std::vector<WeightedPoint> out;
  if (corner < 0) {
    const QuadRule& rule = triangle_rule(std::min(degree, kMaxQuadratureDegree));
    const Mat2 J = (Mat2() << b - a, c - a).finished();
    const double det = std::abs(J.determinant());
    out.reserve(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) out.push_back({a + J * rule.points[q], rule.weights[q] * det});
    return out;
  }

  // Collapsed coordinates around the singular corner s: x = s + r((1-u)(p1-s) + u(p2-s)),
  // dA = |det| r dr du. The radial direction is split into geometrically
  // graded layers with Gauss-Legendre in each.
  const Vec2 s = p[corner];
  const Vec2 e1 = p[(corner + 1) % 3] - s;
  const Vec2 e2 = p[(corner + 2) % 3] - s;
  const double det = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  constexpr double ratio = 0.15;
  constexpr int layers = 12;
  const int n = std::max(2, (std::min(degree, kMaxQuadratureDegree) + 3) / 2);
  const QuadRule radial = gauss_legendre(n);
  const QuadRule angular = gauss_legendre(n);
  double hi = 1.0;
  for (int layer = 0; layer <= layers; ++layer) {
    const double lo = layer == layers ? 0.0 : hi * ratio;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      const double r = lo + (hi - lo) * radial.points[i].x();
      const double wr = (hi - lo) * radial.weights[i] * r;
      for (std::size_t j = 0; j < angular.size(); ++j) {
        const double u = angular.points[j].x();
        out.push_back({s + r * ((1.0 - u) * e1 + u * e2), wr * angular.weights[j] * det});
      }
    }
    hi = lo;
  }
  return out;
}

std::vector<WeightedPoint> element_points(const Mesh& mesh, int t, int degree,
                                          const std::optional<Vec2>& singular) {
  const auto& tri = mesh.triangle(t);
  return triangle_points(mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]), degree, singular);
}

}  // namespace kplate
