#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kplate/mesh.hpp"
#include "kplate/polynomial.hpp"

namespace kplate {

using TensorFunction = std::function<Mat2(const Vec2&)>;

/// Component order for symmetric tensors: (xx, xy, yy).
struct TensorBasisValues {
  std::array<BasisValues, 3> comp;

  Mat2 value(int i) const {
    return (Mat2() << comp[0].v(i), comp[1].v(i), comp[1].v(i), comp[2].v(i)).finished();
  }
  /// d tau / dx and d tau / dy.
  Mat2 dx(int i) const {
    return (Mat2() << comp[0].dx(i), comp[1].dx(i), comp[1].dx(i), comp[2].dx(i)).finished();
  }
  Mat2 dy(int i) const {
    return (Mat2() << comp[0].dy(i), comp[1].dy(i), comp[1].dy(i), comp[2].dy(i)).finished();
  }
  Vec2 div(int i) const {
    return {comp[0].dx(i) + comp[1].dy(i), comp[1].dx(i) + comp[2].dy(i)};
  }
  double divdiv(int i) const { return comp[0].dxx(i) + 2.0 * comp[1].dxy(i) + comp[2].dyy(i); }
};

/// Symmetric tensors of degree k-1 per element with continuous normal-normal
/// trace (the Hellan-Herrmann-Johnson space M_h). DOFs: per edge the moments
/// (1/|E|) int_E tau_nn L_q ds, q <= k-1; per element the moments
/// (1/|T|) int_T tau : (q_r S_c) dx with q_r orthonormal of degree <= k-2 and
/// S_c in {E_xx, (E_xy + E_yx)/sqrt(2), E_yy}.
///
/// Edge DOFs on simply supported and free boundary edges are constrained to
/// zero (sigma_nn = 0 there).
class HHJSpace {
 public:
  /// k is the deflection order; tensors have degree k - 1.
  HHJSpace(MeshPtr mesh, int k);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int deflection_order() const { return k_; }
  int tensor_degree() const { return k_ - 1; }
  int num_dofs() const { return ndofs_; }
  int dofs_per_element() const { return nloc_; }
  int edge_dofs_per_edge() const { return k_; }
  int interior_scalar_tests() const { return num_monomials(k_ - 2); }

  std::span<const int> element_dofs(int t) const {
    return {dofs_.data() + static_cast<std::size_t>(t) * nloc_, static_cast<std::size_t>(nloc_)};
  }
  int edge_dof(int e, int q) const { return e * k_ + q; }
  /// Interior DOF for tensor component c and scalar test r.
  int interior_dof(int t, int c, int r) const {
    return mesh_->num_edges() * k_ + t * 3 * interior_scalar_tests() + c * interior_scalar_tests() + r;
  }
  /// Test tensor S_c scaled by a scalar value.
  static Mat2 test_tensor(int c, double q);

  void evaluate(int t, const Vec2& x, TensorBasisValues& out) const;

  bool constrained(int dof) const { return free_index_[dof] < 0; }
  int num_free() const { return static_cast<int>(free_dofs_.size()); }
  int free_index(int dof) const { return free_index_[dof]; }
  const std::vector<int>& free_dofs() const { return free_dofs_; }

  /// DOF values of a smooth tensor field (canonical interpolant).
  Eigen::VectorXd interpolate(const TensorFunction& tau) const;

 private:
  void build_element(int t);

  MeshPtr mesh_;
  int k_;
  int nloc_;
  int ndofs_;
  std::vector<int> dofs_;
  std::vector<ScaledMonomials> monos_;
  std::vector<Eigen::MatrixXd> coeffs_;  // nloc x (3 nmono), components blocked (xx | xy | yy)
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
};

using HHJSpacePtr = std::shared_ptr<const HHJSpace>;

/// Coefficient vector over an HHJSpace (a moment tensor field).
class MomentField {
 public:
  MomentField(HHJSpacePtr space, Eigen::VectorXd coeffs);
  static MomentField zero(HHJSpacePtr space);

  const HHJSpace& space() const { return *space_; }
  const HHJSpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  Eigen::VectorXd local(int t) const;

  Mat2 value(int t, const Vec2& x) const;
  Vec2 div(int t, const Vec2& x) const;
  double divdiv(int t, const Vec2& x) const;
  /// Directional derivative d tau / d dir.
  Mat2 derivative(int t, const Vec2& x, const Vec2& dir) const;

 private:
  HHJSpacePtr space_;
  Eigen::VectorXd coeffs_;
};

inline double nn(const Mat2& tau, const Vec2& n) { return n.dot(tau * n); }
inline double nt(const Mat2& tau, const Vec2& n, const Vec2& t) { return t.dot(tau * n); }

}  // namespace kplate
