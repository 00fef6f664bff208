#pragma once

#include <optional>

#include <Eigen/Core>

#include "kplate/hhj_space.hpp"
#include "kplate/ipdg.hpp"
#include "kplate/lagrange_space.hpp"

namespace kplate {

struct HHJSolution {
  MomentField sigma;
  ScalarField u;
  double residual;  // relative residual of the saddle-point system
};

/// Mixed method: find sigma in M_h, u in V_h^0 with
///   (sigma, tau) + b(tau, u) = 0,   b(sigma, v) = -(f, v).
HHJSolution solve_hhj(MeshPtr mesh, int k, const ScalarFunction& f,
                      const std::optional<Vec2>& singular = std::nullopt);

/// Element matrix of b(tau_j, v_i): rows local V_h basis, columns local M_h basis.
Eigen::MatrixXd hhj_coupling_local(const LagrangeSpace& V, const HHJSpace& M, int t);

/// b(tau, v) = sum_T ( int_T div tau . grad v - int_{dT} tau_nt d_t v ), with
/// n the element-outward normal and t its counterclockwise rotation.
double b_form(const MomentField& tau, const ScalarField& v);

}  // namespace kplate
