#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kplate/mesh.hpp"
#include "kplate/polynomial.hpp"

namespace kplate {

using ScalarFunction = std::function<double(const Vec2&)>;

/// Continuous P_k space (k >= 2) whose degrees of freedom are vertex values,
/// normalized edge moments (1/|E|) int_E v L_q ds against orthonormal Legendre
/// polynomials along the oriented edge (q <= k-2), and normalized interior
/// moments (1/|T|) int_T v q_r dx against orthonormal polynomials of degree
/// <= k-3. The local basis is dual to these functionals.
///
/// Vertex and edge DOFs on clamped or simply supported boundary parts are
/// constrained to zero; the remaining ("free") DOFs span V_h^0.
class LagrangeSpace {
 public:
  LagrangeSpace(MeshPtr mesh, int k);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int order() const { return k_; }
  int num_dofs() const { return ndofs_; }
  int dofs_per_element() const { return nloc_; }
  int interior_dofs_per_element() const { return num_monomials(k_ - 3); }

  std::span<const int> element_dofs(int t) const {
    return {dofs_.data() + static_cast<std::size_t>(t) * nloc_, static_cast<std::size_t>(nloc_)};
  }
  int vertex_dof(int v) const { return v; }
  int edge_dof(int e, int q) const { return mesh_->num_vertices() + e * (k_ - 1) + q; }
  int interior_dof(int t, int r) const {
    return mesh_->num_vertices() + mesh_->num_edges() * (k_ - 1) + t * interior_dofs_per_element() + r;
  }

  /// Local basis of element t at physical point x (which may lie anywhere;
  /// the element polynomial is evaluated).
  void evaluate(int t, const Vec2& x, BasisValues& out) const;
  const Eigen::MatrixXd& coefficients(int t) const { return coeffs_[t]; }
  const ScaledMonomials& monomials(int t) const { return monos_[t]; }

  bool constrained(int dof) const { return free_index_[dof] < 0; }
  int num_free() const { return static_cast<int>(free_dofs_.size()); }
  int free_index(int dof) const { return free_index_[dof]; }
  const std::vector<int>& free_dofs() const { return free_dofs_; }

  /// Applies every global DOF functional to v (the interpolant I_h v).
  Eigen::VectorXd interpolate(const ScalarFunction& v) const;

 private:
  void build_element(int t);

  MeshPtr mesh_;
  int k_;
  int nloc_;
  int ndofs_;
  std::vector<int> dofs_;
  std::vector<ScaledMonomials> monos_;
  std::vector<Eigen::MatrixXd> coeffs_;  // nloc x nmono: basis_i = sum_j C(i,j) m_j
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
};

using LagrangeSpacePtr = std::shared_ptr<const LagrangeSpace>;

/// Coefficient vector over a LagrangeSpace.
class ScalarField {
 public:
  ScalarField(LagrangeSpacePtr space, Eigen::VectorXd coeffs);
  static ScalarField zero(LagrangeSpacePtr space);

  const LagrangeSpace& space() const { return *space_; }
  const LagrangeSpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  /// Local coefficient vector on element t.
  Eigen::VectorXd local(int t) const;
  double value(int t, const Vec2& x) const;
  Vec2 gradient(int t, const Vec2& x) const;
  Mat2 hessian(int t, const Vec2& x) const;

 private:
  LagrangeSpacePtr space_;
  Eigen::VectorXd coeffs_;
};

}  // namespace kplate
