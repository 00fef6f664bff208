#pragma once

// Shared helpers for the test suites: random fields and a finite-difference
// bilaplacian used as an independent oracle for manufactured loads.

#include <memory>
#include <random>

#include <Eigen/Core>

#include "kplate/c1_space.hpp"
#include "kplate/hhj_space.hpp"
#include "kplate/lagrange_space.hpp"
#include "kplate/mesh.hpp"
#include "kplate/polynomial.hpp"

namespace kplate::testing {

inline MeshPtr share(Mesh mesh) { return std::make_shared<const Mesh>(std::move(mesh)); }

/// Uniform(-1, 1) on the free DOFs, zero on constrained ones.
inline Eigen::VectorXd random_free(int ndofs, const std::vector<int>& free, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ndofs);
  for (int i : free) c(i) = d(rng);
  return c;
}

inline ScalarField random_scalar(const LagrangeSpacePtr& V, std::mt19937& rng) {
  return ScalarField(V, random_free(V->num_dofs(), V->free_dofs(), rng));
}

inline MomentField random_moment(const HHJSpacePtr& M, std::mt19937& rng) {
  return MomentField(M, random_free(M->num_dofs(), M->free_dofs(), rng));
}

inline C1Field random_c1(const C1SpacePtr& C, std::mt19937& rng) {
  return C1Field(C, random_free(C->num_dofs(), C->free_dofs(), rng));
}

/// Element containing x (first match), or -1.
inline int find_element(const Mesh& m, const Vec2& x) {
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Vec2 r = element_map(m, t).inverse(x);
    if (r.x() >= -1e-12 && r.y() >= -1e-12 && r.x() + r.y() <= 1 + 1e-12) return t;
  }
  return -1;
}

/// C1 field with the DOFs of a smooth function (vertex values and scaled
/// gradients, edge-midpoint normal derivatives for the full variant).
template <class G, class DG>
C1Field c1_interpolate(const C1SpacePtr& C, const G& g, const DG& grad) {
  const Mesh& m = C->mesh();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(C->num_dofs());
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Vec2 x = m.vertex(v);
    const Vec2 d = C->vertex_scale(v) * (C->vertex_frame(v).transpose() * grad(x));
    c(3 * v) = g(x);
    c(3 * v + 1) = d.x();
    c(3 * v + 2) = d.y();
  }
  if (C->variant() == C1Variant::FullCT) {
    for (int e = 0; e < m.num_edges(); ++e) {
      c(3 * m.num_vertices() + e) = m.edge_length(e) * m.edge_normal(e).dot(grad(m.edge_point(e, 0.5)));
    }
  }
  return C1Field(C, c);
}

/// Second-order 13-point stencil for the bilaplacian.
template <class F>
double bilaplacian_stencil(const F& u, const Vec2& x, double h) {
  auto at = [&](int i, int j) { return u(Vec2(x.x() + i * h, x.y() + j * h)); };
  const double s = 20.0 * at(0, 0) - 8.0 * (at(1, 0) + at(-1, 0) + at(0, 1) + at(0, -1)) +
                   2.0 * (at(1, 1) + at(1, -1) + at(-1, 1) + at(-1, -1)) +
                   (at(2, 0) + at(-2, 0) + at(0, 2) + at(0, -2));
  return s / (h * h * h * h);
}

/// Two Richardson steps on the stencil with h, h/2, h/4 (sixth order).
template <class F>
double fd_bilaplacian(const F& u, const Vec2& x, double h) {
  const double b0 = bilaplacian_stencil(u, x, h);
  const double b1 = bilaplacian_stencil(u, x, h / 2);
  const double b2 = bilaplacian_stencil(u, x, h / 4);
  const double r0 = (4.0 * b1 - b0) / 3.0;
  const double r1 = (4.0 * b2 - b1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

}  // namespace kplate::testing
