#include "kplate/hhj_solver.hpp"

#include <stdexcept>

#include <Eigen/SparseLU>

#include "kplate/projection.hpp"
#include "kplate/quadrature.hpp"
#include "linear_solve.hpp"

namespace kplate {

Eigen::MatrixXd hhj_coupling_local(const LagrangeSpace& V, const HHJSpace& M, int t) {
  const Mesh& m = V.mesh();
  const int k = V.order();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(V.dofs_per_element(), M.dofs_per_element());
  BasisValues vb;
  TensorBasisValues tb;
  for (const auto& qp : element_points(m, t, 2 * k)) {
    V.evaluate(t, qp.x, vb);
    M.evaluate(t, qp.x, tb);
    const Eigen::VectorXd divx = tb.comp[0].dx + tb.comp[1].dy;
    const Eigen::VectorXd divy = tb.comp[1].dx + tb.comp[2].dy;
    B.noalias() += qp.w * (vb.dx * divx.transpose() + vb.dy * divy.transpose());
  }
  const QuadRule& er = edge_rule(2 * k);
  for (int i = 0; i < 3; ++i) {
    const int e = m.triangle_edges(t)[i];
    const double sign = m.edge(e).t[0] == t ? 1.0 : -1.0;
    const Vec2 n = sign * m.edge_normal(e);
    const Vec2 tt(-n.y(), n.x());
    const double h = m.edge_length(e);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const Vec2 x = m.edge_point(e, er.points[q].x());
      V.evaluate(t, x, vb);
      M.evaluate(t, x, tb);
      // t^T tau n for symmetric tau stored as (xx, xy, yy)
      const Eigen::VectorXd tnt = tt.x() * n.x() * tb.comp[0].v + (tt.x() * n.y() + tt.y() * n.x()) * tb.comp[1].v +
                                  tt.y() * n.y() * tb.comp[2].v;
      const Eigen::VectorXd dt = tt.x() * vb.dx + tt.y() * vb.dy;
      B.noalias() -= er.weights[q] * h * dt * tnt.transpose();
    }
  }
  return B;
}

double b_form(const MomentField& tau, const ScalarField& v) {
  const Mesh& m = v.space().mesh();
  if (&m != &tau.space().mesh()) throw std::invalid_argument("b_form: fields live on different meshes");
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    s += v.local(t).dot(hhj_coupling_local(v.space(), tau.space(), t) * tau.local(t));
  }
  return s;
}

HHJSolution solve_hhj(MeshPtr mesh, int k, const ScalarFunction& f, const std::optional<Vec2>& singular) {
  auto V = std::make_shared<const LagrangeSpace>(mesh, k);
  auto M = std::make_shared<const HHJSpace>(mesh, k);
  const Mesh& m = *mesh;
  const int nm = M->num_free();
  const int nv = V->num_free();
  std::vector<Eigen::Triplet<double>> trip;
  TensorBasisValues tb;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto md = M->element_dofs(t);
    const auto vd = V->element_dofs(t);
    const int nl = M->dofs_per_element();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nl, nl);
    for (const auto& qp : element_points(m, t, 2 * k)) {
      M->evaluate(t, qp.x, tb);
      A.noalias() += qp.w * (tb.comp[0].v * tb.comp[0].v.transpose() + 2.0 * tb.comp[1].v * tb.comp[1].v.transpose() +
                             tb.comp[2].v * tb.comp[2].v.transpose());
    }
    const Eigen::MatrixXd B = hhj_coupling_local(*V, *M, t);
    for (int i = 0; i < nl; ++i) {
      const int fi = M->free_index(md[i]);
      if (fi < 0) continue;
      for (int j = 0; j < nl; ++j) {
        const int fj = M->free_index(md[j]);
        if (fj >= 0) trip.emplace_back(fi, fj, A(i, j));
      }
      for (int r = 0; r < B.rows(); ++r) {
        const int fr = V->free_index(vd[r]);
        if (fr < 0 || B(r, i) == 0.0) continue;
        trip.emplace_back(nm + fr, fi, B(r, i));
        trip.emplace_back(fi, nm + fr, B(r, i));
      }
    }
  }
  SparseMatrix K(nm + nv, nm + nv);
  K.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nm + nv);
  if (f) {
    const Eigen::VectorXd F = load_vector(*V, f, 2 * k + 6, singular);
    for (int i = 0; i < nv; ++i) rhs(nm + i) = -F(V->free_dofs()[i]);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nm + nv);
  double res = 0.0;
  const double bn = rhs.norm();
  if (bn > 0.0) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) throw SolverError("HHJ factorization failed", 1.0);
    x = lu.solve(rhs);
    res = detail::refine(K, rhs, [&](const Eigen::VectorXd& r) { return Eigen::VectorXd(lu.solve(r)); }, x);
    if (!(res <= 1e-10)) throw SolverError("HHJ solve failed", res);
  }
  Eigen::VectorXd sc = Eigen::VectorXd::Zero(M->num_dofs());
  for (int i = 0; i < nm; ++i) sc(M->free_dofs()[i]) = x(i);
  Eigen::VectorXd uc = Eigen::VectorXd::Zero(V->num_dofs());
  for (int i = 0; i < nv; ++i) uc(V->free_dofs()[i]) = x(nm + i);
  return {MomentField(M, std::move(sc)), ScalarField(V, std::move(uc)), res};
}

}  // namespace kplate
