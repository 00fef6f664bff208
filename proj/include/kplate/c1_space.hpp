#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kplate/mesh.hpp"
#include "kplate/polynomial.hpp"

namespace kplate {

enum class C1Variant {
  ReducedHCT,  // 9 DOFs per element, contains P2
  FullCT       // 12 DOFs per element, contains P3
};

/// Hsieh-Clough-Tocher macro elements: each triangle is split at its centroid
/// into three cubic pieces glued with C1 continuity. Sub-triangle i is
/// (p_{i+1}, p_{i+2}, centroid) and contains the outer edge i.
///
/// Global DOFs per vertex: the value and h_V times the gradient expressed in a
/// per-vertex orthonormal frame; for FullCT additionally h_E times the normal
/// derivative at each edge midpoint. Frames are aligned with the boundary so
/// that u = 0 on clamped/simply supported parts and d_n u = 0 on clamped parts
/// become DOF constraints.
class C1Space {
 public:
  C1Space(MeshPtr mesh, C1Variant variant);

  const Mesh& mesh() const { return *mesh_; }
  C1Variant variant() const { return variant_; }
  int num_dofs() const { return ndofs_; }
  int dofs_per_element() const { return nloc_; }
  std::span<const int> element_dofs(int t) const {
    return {dofs_.data() + static_cast<std::size_t>(t) * nloc_, static_cast<std::size_t>(nloc_)};
  }

  /// Vertices of sub-triangle `sub` of element t (counterclockwise).
  std::array<Vec2, 3> sub_triangle(int t, int sub) const;
  /// Sub-triangle containing x (ties resolved to the lowest index).
  int locate(int t, const Vec2& x) const;

  /// Local basis on sub-triangle `sub` of element t.
  void evaluate(int t, int sub, const Vec2& x, BasisValues& out) const;

  bool constrained(int dof) const { return free_index_[dof] < 0; }
  int num_free() const { return static_cast<int>(free_dofs_.size()); }
  int free_index(int dof) const { return free_index_[dof]; }
  const std::vector<int>& free_dofs() const { return free_dofs_; }

  const Mat2& vertex_frame(int v) const { return frames_[v]; }
  double vertex_scale(int v) const { return vscale_[v]; }

  /// Largest residual of the local C1/DOF conditions met when building the
  /// element bases (diagnostic).
  double construction_residual() const { return construction_residual_; }

 private:
  void build_frames();
  void build_element(int t);

  MeshPtr mesh_;
  C1Variant variant_;
  int nloc_;
  int ndofs_;
  std::vector<int> dofs_;
  std::vector<Mat2> frames_;  // columns e1, e2
  std::vector<double> vscale_;
  std::vector<ScaledMonomials> monos_;
  std::vector<std::array<Eigen::MatrixXd, 3>> coeffs_;  // per sub: nloc x 10
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
  double construction_residual_ = 0.0;
};

using C1SpacePtr = std::shared_ptr<const C1Space>;

class C1Field {
 public:
  C1Field(C1SpacePtr space, Eigen::VectorXd coeffs);

  const C1Space& space() const { return *space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd local(int t) const;

  double value(int t, int sub, const Vec2& x) const;
  Vec2 gradient(int t, int sub, const Vec2& x) const;
  Mat2 hessian(int t, int sub, const Vec2& x) const;

 private:
  C1SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

}  // namespace kplate
