#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kplate/c1_space.hpp"
#include "kplate/hhj_space.hpp"
#include "kplate/lagrange_space.hpp"

namespace kplate {

/// Exact deflection with first and second derivatives.
struct ExactSolution {
  ScalarFunction u;
  std::function<Vec2(const Vec2&)> gradient;
  TensorFunction hessian;
};

/// Constant of the data-oscillation majorant.
inline constexpr double kOscillationConstant = 0.3682146;

/// Estimator components. Per-element vectors hold local (unsquared)
/// contributions; globals are l2 sums. NaN marks unavailable values.
struct ErrorReport {
  int dofs = 0;  // dim V_h^0
  int elements = 0;
  double eta_eq = 0.0;
  double eta_nonconf = 0.0;
  double eta_mean = 0.0;
  double eta_jump = 0.0;
  double eta_osc = 0.0;
  double exact_err = 0.0;
  bool has_conforming = false;
  bool has_exact = false;
  std::vector<double> eta_eq_T, eta_mean_T, eta_nonconf_T, eta_osc_T;

  double basic_bound() const;
  double improved_bound() const;
  double eff_eq() const;
  double eff() const;
};

double guaranteed_bound_basic(const ErrorReport& report);
double guaranteed_bound_improved(const ErrorReport& report);

struct EstimatorInput {
  const ScalarField* uh = nullptr;
  const MomentField* sigma = nullptr;
  const C1Field* uconf = nullptr;  // optional
  ScalarFunction f;
  double alpha = 9.0;
  const ExactSolution* exact = nullptr;  // optional
  std::optional<Vec2> singular;
};

ErrorReport compute_report(const EstimatorInput& in);

/// ||u - u_h||_DG; only u_h contributes normal-derivative jumps.
double exact_dg_error(const ScalarField& uh, const ExactSolution& exact, double alpha,
                      const std::optional<Vec2>& singular = std::nullopt);

/// Squared oscillation terms h_T^4 ||f - fbar||_T^2 per element (fbar is the
/// element-wise projection onto degree k-3).
std::vector<double> oscillation_terms(const ScalarFunction& f, int k, MeshPtr mesh,
                                      const std::optional<Vec2>& singular = std::nullopt);

}  // namespace kplate
