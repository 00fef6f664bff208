#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kplate/c1_space.hpp"
#include "kplate/hhj_space.hpp"
#include "kplate/lagrange_space.hpp"

namespace kplate {

/// <div div tau, v> = sum_T int_T tau : grad^2 v - sum_E int_E tau_nn [d_n v].
/// Both arguments must satisfy their homogeneous essential conditions;
/// otherwise std::invalid_argument is thrown.
double divdiv_pairing_jump(const MomentField& tau, const ScalarField& v);
double divdiv_pairing_jump(const MomentField& tau, const C1Field& v);

/// -sum_T int_T div tau . grad v + sum_E int_E [tau_nt] d_t v.
double divdiv_pairing_div(const MomentField& tau, const ScalarField& v);

/// Element densities, edge densities and vertex charges representing
/// div div tau:
///   f^T = div div tau|_T,  f^E = [-d_t tau_nt - div tau . n],
///   f^V = sum_{E > V} delta(E, V) [tau_nt](V),  delta = +1 at V2(E), -1 at V1(E).
struct DistributionalLoad {
  MeshPtr mesh;
  int k = 2;
  std::vector<double> vertex;               // f^V
  std::vector<Eigen::VectorXd> edge;        // f^E in orthonormal Legendre coefficients along E (degree k-2)
  std::vector<ScaledMonomials> element_basis;
  std::vector<Eigen::VectorXd> element;     // f^T in element monomials (degree k-3)
  double remainder = 0.0;                   // largest L2 misfit of the degree bounds

  double edge_density(int e, double s) const;
  double element_density(int t, const Vec2& x) const;
  /// sum_V f^V v(V) + sum_E int_E f^E v + sum_T int_T f^T v.
  double action(const ScalarField& v) const;
};

DistributionalLoad distributional_load(const MomentField& tau);

/// Pairing evaluated through the vertex/edge/element representation.
double divdiv_pairing_vertexform(const MomentField& tau, const ScalarField& v);

/// <div div tau, phi_i> for every global DOF of the space.
Eigen::VectorXd divdiv_vector(const MomentField& tau, const LagrangeSpace& space);

class EquilibrationError : public std::runtime_error {
 public:
  EquilibrationError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// max over V_h^0 basis functions of |<div div tau, phi> - (f, phi)|, and the
/// tolerance 1e-9 (1 + ||f||_0) it is checked against.
struct EquilibrationCheck {
  double residual;
  double tolerance;
  bool passed() const { return residual <= tolerance; }
};
EquilibrationCheck check_equilibration(const MomentField& tau, const LagrangeSpace& space, const ScalarFunction& f,
                                       const std::optional<Vec2>& singular = std::nullopt);

struct EquilibratedTensor {
  MomentField sigma;
  EquilibrationCheck check;
};

/// Local construction of sigma^eq in M_h from the IPDG solution u_h:
/// edge traces {d_nn u_h} - alpha/h_E [d_n u_h] (zero on simply supported and
/// free edges) and element moments
///   int_T grad^2 u_h : q - sum_E gamma_E int_E [d_n u_h] q_nn,
/// gamma_E = 1/2 inside and 1 on clamped edges. Throws EquilibrationError if
/// the equilibration identity fails against f.
EquilibratedTensor equilibrate_from_dg(const ScalarField& uh, double alpha, const ScalarFunction& f,
                                       const std::optional<Vec2>& singular = std::nullopt);

/// The construction alone, without the residual check.
MomentField equilibrated_tensor(const ScalarField& uh, double alpha);

}  // namespace kplate
