#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include "kplate/mesh.hpp"

namespace kplate {

/// Number of bivariate monomials of total degree <= p (0 for p < 0).
constexpr int num_monomials(int p) { return p < 0 ? 0 : (p + 1) * (p + 2) / 2; }

/// Values and derivatives of a family of functions at one point.
/// Second derivatives are stored as (xx, xy, yy).
struct BasisValues {
  Eigen::VectorXd v, dx, dy, dxx, dxy, dyy;
  void resize(int n);
  Vec2 grad(int i) const { return {dx(i), dy(i)}; }
  Mat2 hessian(int i) const { return (Mat2() << dxx(i), dxy(i), dxy(i), dyy(i)).finished(); }
};

/// Monomials ((x - c)/h)^i ((y - c)/h)^j, i + j <= degree, ordered by total
/// degree and then by decreasing power of x.
class ScaledMonomials {
 public:
  ScaledMonomials() = default;
  ScaledMonomials(int degree, const Vec2& center, double scale);

  int degree() const { return degree_; }
  int size() const { return num_monomials(degree_); }
  const Vec2& center() const { return center_; }
  double scale() const { return scale_; }

  /// Values only.
  void values(const Vec2& x, Eigen::Ref<Eigen::VectorXd> out) const;
  /// Values, first and second derivatives in physical coordinates.
  void evaluate(const Vec2& x, BasisValues& out) const;

 private:
  int degree_ = 0;
  Vec2 center_ = Vec2::Zero();
  double scale_ = 1.0;
};

/// Orthonormal polynomials of degree <= p on the reference triangle with
/// respect to the normalized inner product 2 * int_ref f g. Returns the
/// coefficient matrix C such that q_r = sum_j C(r, j) xhat^a_j yhat^b_j (plain
/// monomials in reference coordinates, same ordering as ScaledMonomials).
const Eigen::MatrixXd& reference_orthonormal(int p);

/// Evaluates the orthonormal reference polynomials of degree <= p at a
/// reference point.
void reference_orthonormal_values(int p, const Vec2& ref, Eigen::Ref<Eigen::VectorXd> out);

/// Shifted Legendre polynomials on [0,1], orthonormal: int_0^1 L_i L_j = delta_ij.
void legendre_values(int p, double s, Eigen::Ref<Eigen::VectorXd> out);

/// Affine map of a mesh triangle: x = p0 + J xhat.
struct AffineMap {
  Vec2 origin;
  Mat2 jacobian;
  Vec2 operator()(const Vec2& ref) const { return origin + jacobian * ref; }
  Vec2 inverse(const Vec2& x) const { return jacobian.inverse() * (x - origin); }
};

AffineMap element_map(const Mesh& mesh, int t);

}  // namespace kplate
