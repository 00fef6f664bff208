#include "kplate/projection.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "kplate/quadrature.hpp"

namespace kplate {

Eigen::VectorXd load_vector(const LagrangeSpace& space, const ScalarFunction& f, int degree,
                            const std::optional<Vec2>& singular) {
  const Mesh& m = space.mesh();
  degree = std::min(degree, kMaxQuadratureDegree);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
  BasisValues bv;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto dofs = space.element_dofs(t);
    Eigen::VectorXd local = Eigen::VectorXd::Zero(dofs.size());
    for (const auto& qp : element_points(m, t, degree, singular)) {
      space.evaluate(t, qp.x, bv);
      local += qp.w * f(qp.x) * bv.v;
    }
    for (std::size_t i = 0; i < dofs.size(); ++i) b(dofs[i]) += local(i);
  }
  return b;
}

ScalarField interpolate_Ih(LagrangeSpacePtr space, const ScalarFunction& v) {
  Eigen::VectorXd c = space->interpolate(v);
  return ScalarField(std::move(space), std::move(c));
}

ConformingProjection project_conforming(const ScalarField& uh, C1SpacePtr c1) {
  const Mesh& m = c1->mesh();
  if (&m != &uh.space().mesh()) throw std::invalid_argument("project_conforming: fields live on different meshes");
  const int nf = c1->num_free();
  const int degree = std::max(6, uh.space().order() + 3);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  BasisValues cb, lb;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto dofs = c1->element_dofs(t);
    const int nl = static_cast<int>(dofs.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nl, nl);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nl);
    const Eigen::VectorXd uloc = uh.local(t);
    for (int s = 0; s < 3; ++s) {
      const auto p = c1->sub_triangle(t, s);
      for (const auto& qp : triangle_points(p[0], p[1], p[2], degree)) {
        c1->evaluate(t, s, qp.x, cb);
        uh.space().evaluate(t, qp.x, lb);
        M.noalias() += qp.w * cb.v * cb.v.transpose();
        r += qp.w * lb.v.dot(uloc) * cb.v;
      }
    }
    for (int i = 0; i < nl; ++i) {
      const int fi = c1->free_index(dofs[i]);
      if (fi < 0) continue;
      rhs(fi) += r(i);
      for (int j = 0; j < nl; ++j) {
        const int fj = c1->free_index(dofs[j]);
        if (fj >= 0) trip.emplace_back(fi, fj, M(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> A(nf, nf);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("project_conforming: singular mass system");
  const Eigen::VectorXd x = llt.solve(rhs);
  const double bn = rhs.norm();
  const double res = bn > 0 ? (A * x - rhs).norm() / bn : (A * x - rhs).norm();

  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(c1->num_dofs());
  for (int i = 0; i < nf; ++i) coeffs(c1->free_dofs()[i]) = x(i);
  return {C1Field(std::move(c1), std::move(coeffs)), res};
}

PiecewisePolynomial::PiecewisePolynomial(MeshPtr mesh, int degree) : mesh_(std::move(mesh)), degree_(degree) {
  const int n = mesh_->num_triangles();
  monos_.resize(n);
  coeffs_.resize(n);
  for (int t = 0; t < n; ++t) {
    if (degree_ >= 0) monos_[t] = ScaledMonomials(degree_, mesh_->centroid(t), mesh_->diameter(t));
    coeffs_[t] = Eigen::VectorXd::Zero(num_monomials(degree_));
  }
}

double PiecewisePolynomial::value(int t, const Vec2& x) const {
  if (degree_ < 0) return 0.0;
  Eigen::VectorXd mv(monos_[t].size());
  monos_[t].values(x, mv);
  return mv.dot(coeffs_[t]);
}

PiecewisePolynomial l2_project_piecewise(const ScalarFunction& f, int degree, MeshPtr mesh,
                                         const std::optional<Vec2>& singular) {
  PiecewisePolynomial out(mesh, degree);
  if (degree < 0) return out;
  const int nm = num_monomials(degree);
  const int qdeg = std::min(kMaxQuadratureDegree, 2 * degree + 10);
  Eigen::VectorXd mv(nm);
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nm, nm);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nm);
    for (const auto& qp : element_points(*mesh, t, qdeg, singular)) {
      out.monomials(t).values(qp.x, mv);
      G.noalias() += qp.w * mv * mv.transpose();
      r += qp.w * f(qp.x) * mv;
    }
    out.coeffs(t) = G.ldlt().solve(r);
  }
  return out;
}

}  // namespace kplate
