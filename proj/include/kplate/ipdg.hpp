#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCore>

#include "kplate/hhj_space.hpp"
#include "kplate/lagrange_space.hpp"

namespace kplate {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Linear solver failure; carries the relative residual that was reached.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Default penalty (k+1)^2 scaled by alpha0.
inline double default_penalty(int k, double alpha0 = 1.0) { return alpha0 * (k + 1) * (k + 1); }

/// Edges carrying consistency and penalty terms: interior and clamped ones.
bool penalized_edge(const Mesh& mesh, int e);

/// C0 interior penalty discretization of the plate problem. Boundary
/// conditions come from the mesh tags.
struct IPDGProblem {
  MeshPtr mesh;
  int k = 2;
  double alpha = 9.0;
  ScalarFunction f;
  std::optional<Vec2> singular;  // point where f may be singular (mesh vertex)
};

struct LinearSystem {
  LagrangeSpacePtr space;
  SparseMatrix A;     // on free DOFs
  Eigen::VectorXd b;  // on free DOFs
};

/// `adapted = false` keeps the edge terms on every boundary edge regardless of
/// its kind (the form for a fully clamped plate).
LinearSystem assemble(const IPDGProblem& problem, bool adapted = true);
/// Same bilinear form with an existing space and no load.
SparseMatrix assemble_matrix(const LagrangeSpace& space, double alpha, bool adapted = true);

/// Discrete solution; constrained DOFs are zero.
ScalarField solve(const IPDGProblem& problem);
/// Solves a free-DOF system, checks the residual, and scatters into a field.
ScalarField solve_system(const LinearSystem& system);

struct DGNormParts {
  double hessian = 0.0;  // sum_T |v|_{2,T}^2
  double jump = 0.0;     // sum_E alpha/h_E ||[d_n v]||_E^2 over penalized edges
  double total() const;  // the norm, sqrt(hessian + jump)
};

DGNormParts dg_norm(const ScalarField& v, double alpha);
/// Gram matrix of the squared DG norm on free DOFs.
SparseMatrix dg_gram(const LagrangeSpace& space, double alpha);

/// A_h(u, v) for two fields on the same space.
double ipdg_form(const ScalarField& u, const ScalarField& v, double alpha);

}  // namespace kplate
