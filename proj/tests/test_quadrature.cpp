#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kplate/mesh.hpp"
#include "kplate/quadrature.hpp"

using namespace kplate;

namespace {

double factorial(int n) {
  double v = 1.0;
  for (int i = 2; i <= n; ++i) v *= i;
  return v;
}

double integrate(const QuadRule& q, int a, int b) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i].x(), a) * std::pow(q.points[i].y(), b);
  return s;
}

double integrate_edge(const QuadRule& q, int a) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i].x(), a);
  return s;
}

}  // namespace

TEST(Quadrature, TriangleExamples) {
  const QuadRule& q = triangle_rule(5);
  EXPECT_NEAR(integrate(q, 0, 0), 0.5, 1e-15);
  EXPECT_NEAR(integrate(q, 1, 1), 1.0 / 24.0, 1e-15);
  EXPECT_NEAR(integrate(q, 2, 3), 1.0 / 420.0, 1e-15);
}

TEST(Quadrature, EdgeExamples) {
  const QuadRule& q = edge_rule(6);
  EXPECT_NEAR(integrate_edge(q, 0), 1.0, 1e-15);
  EXPECT_NEAR(integrate_edge(q, 3), 0.25, 1e-15);
  EXPECT_NEAR(integrate_edge(q, 6), 1.0 / 7.0, 1e-15);
}

TEST(Quadrature, TriangleMonomialExactnessSweep) {
  for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
    const QuadRule& q = triangle_rule(d);
    EXPECT_GE(q.degree, d);
    for (double w : q.weights) EXPECT_GT(w, 0.0);
    for (const Vec2& p : q.points) {
      EXPECT_GE(p.x(), 0.0);
      EXPECT_GE(p.y(), 0.0);
      EXPECT_LE(p.x() + p.y(), 1.0);
    }
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        EXPECT_NEAR(integrate(q, a, b), exact, 1e-13 * exact) << "d=" << d << " a=" << a << " b=" << b;
      }
    }
  }
}

TEST(Quadrature, EdgeMonomialExactnessSweep) {
  for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
    const QuadRule& q = edge_rule(d);
    for (double w : q.weights) EXPECT_GT(w, 0.0);
    for (int a = 0; a <= d; ++a) {
      EXPECT_NEAR(integrate_edge(q, a), 1.0 / (a + 1), 1e-13 / (a + 1)) << "d=" << d << " a=" << a;
    }
  }
}

TEST(Quadrature, DegreeOutOfRange) {
  EXPECT_THROW(triangle_rule(-1), std::out_of_range);
  EXPECT_THROW(triangle_rule(kMaxQuadratureDegree + 1), std::out_of_range);
  EXPECT_THROW(edge_rule(kMaxQuadratureDegree + 1), std::out_of_range);
}

TEST(Quadrature, GaussJacobiWeight) {
  // int_0^1 x * x^a dx = 1 / (a + 2), exact for a <= 2n - 1.
  const QuadRule q = gauss_jacobi_x(5);
  for (int a = 0; a <= 9; ++a) EXPECT_NEAR(integrate_edge(q, a), 1.0 / (a + 2), 1e-14);
}

TEST(Quadrature, PhysicalTrianglePushForward) {
  const Vec2 a(0.2, -0.1), b(1.5, 0.3), c(0.4, 0.9);
  const auto pts = triangle_points(a, b, c, 4);
  const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  double s1 = 0.0, sx = 0.0;
  for (const auto& p : pts) {
    s1 += p.w;
    sx += p.w * p.x.x();
  }
  EXPECT_NEAR(s1, area, 1e-14);
  EXPECT_NEAR(sx, area * (a.x() + b.x() + c.x()) / 3.0, 1e-14);
}

TEST(Quadrature, GradedRuleIntegratesCornerSingularity) {
  // int over the reference triangle of r^beta, with r the distance to (0,0):
  // int_0^{pi/2} int_0^{1/(cos+sin)} r^{beta+1} dr dphi.
  const double beta = -0.4557;
  const Vec2 a(0, 0), b(1, 0), c(0, 1);
  double exact = 0.0;
  const QuadRule& g = edge_rule(kMaxQuadratureDegree);
  const int pieces = 200;
  for (int k = 0; k < pieces; ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double phi = (k + g.points[i].x()) / pieces * M_PI / 2;
      exact += g.weights[i] / pieces * M_PI / 2 * std::pow(1.0 / (std::cos(phi) + std::sin(phi)), beta + 2) / (beta + 2);
    }
  }
  double graded = 0.0, plain = 0.0;
  for (const auto& p : triangle_points(a, b, c, 20, Vec2(0, 0))) graded += p.w * std::pow(p.x.norm(), beta);
  for (const auto& p : triangle_points(a, b, c, 20)) plain += p.w * std::pow(p.x.norm(), beta);
  EXPECT_NEAR(graded, exact, 1e-8 * exact);
  EXPECT_GT(std::abs(plain - exact), 100 * std::abs(graded - exact));
}

TEST(Quadrature, ElementPointsMatchMeshGeometry) {
  const Mesh m = make_lshape_mesh(2);
  double total = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (const auto& p : element_points(m, t, 2)) total += p.w;
  }
  EXPECT_NEAR(total, 3.0, 1e-14);
}
