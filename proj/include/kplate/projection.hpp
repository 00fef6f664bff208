#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "kplate/c1_space.hpp"
#include "kplate/lagrange_space.hpp"

namespace kplate {

/// (f, phi_i) for every global DOF of the space.
Eigen::VectorXd load_vector(const LagrangeSpace& space, const ScalarFunction& f, int degree,
                            const std::optional<Vec2>& singular = std::nullopt);

/// The interpolant I_h v as a field.
ScalarField interpolate_Ih(LagrangeSpacePtr space, const ScalarFunction& v);

struct ConformingProjection {
  C1Field field;
  double residual;  // relative residual of the mass system
};

/// L2 projection of u_h onto the constrained C1 space.
ConformingProjection project_conforming(const ScalarField& uh, C1SpacePtr c1);

/// Element-wise polynomial of a fixed degree (identically zero for degree < 0).
class PiecewisePolynomial {
 public:
  PiecewisePolynomial(MeshPtr mesh, int degree);

  int degree() const { return degree_; }
  double value(int t, const Vec2& x) const;
  Eigen::VectorXd& coeffs(int t) { return coeffs_[t]; }
  const Eigen::VectorXd& coeffs(int t) const { return coeffs_[t]; }
  const ScaledMonomials& monomials(int t) const { return monos_[t]; }

 private:
  MeshPtr mesh_;
  int degree_;
  std::vector<ScaledMonomials> monos_;
  std::vector<Eigen::VectorXd> coeffs_;
};

/// Element-wise L2 projection of f onto polynomials of the given degree.
PiecewisePolynomial l2_project_piecewise(const ScalarFunction& f, int degree, MeshPtr mesh,
                                         const std::optional<Vec2>& singular = std::nullopt);

}  // namespace kplate
