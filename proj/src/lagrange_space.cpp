#include "kplate/lagrange_space.hpp"

#include <stdexcept>

#include <Eigen/LU>

#include "kplate/quadrature.hpp"

namespace kplate {

LagrangeSpace::LagrangeSpace(MeshPtr mesh, int k) : mesh_(std::move(mesh)), k_(k) {
  if (k_ < 2 || k_ > 6) throw std::invalid_argument("LagrangeSpace: order must lie in [2, 6]");
  const Mesh& m = *mesh_;
  nloc_ = num_monomials(k_);
  const int ni = interior_dofs_per_element();
  ndofs_ = m.num_vertices() + m.num_edges() * (k_ - 1) + m.num_triangles() * ni;

  dofs_.resize(static_cast<std::size_t>(m.num_triangles()) * nloc_);
  for (int t = 0; t < m.num_triangles(); ++t) {
    int* d = dofs_.data() + static_cast<std::size_t>(t) * nloc_;
    const auto& tri = m.triangle(t);
    int pos = 0;
    for (int i = 0; i < 3; ++i) d[pos++] = vertex_dof(tri[i]);
    for (int i = 0; i < 3; ++i) {
      for (int q = 0; q < k_ - 1; ++q) d[pos++] = edge_dof(m.triangle_edges(t)[i], q);
    }
    for (int r = 0; r < ni; ++r) d[pos++] = interior_dof(t, r);
  }

  std::vector<char> fixed(ndofs_, 0);
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.vertex_touches(v, BoundaryKind::Clamped) || m.vertex_touches(v, BoundaryKind::SimplySupported))
      fixed[vertex_dof(v)] = 1;
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.edge(e).boundary() || m.boundary_kind(e) == BoundaryKind::Free) continue;
    for (int q = 0; q < k_ - 1; ++q) fixed[edge_dof(e, q)] = 1;
  }
  free_index_.assign(ndofs_, -1);
  for (int i = 0; i < ndofs_; ++i) {
    if (fixed[i]) continue;
    free_index_[i] = static_cast<int>(free_dofs_.size());
    free_dofs_.push_back(i);
  }

  monos_.resize(m.num_triangles());
  coeffs_.resize(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) build_element(t);
}

void LagrangeSpace::build_element(int t) {
  const Mesh& m = *mesh_;
  const ScaledMonomials mono(k_, m.centroid(t), m.diameter(t));
  const int nm = mono.size();
  Eigen::MatrixXd G(nloc_, nm);
  Eigen::VectorXd mv(nm);
  const auto& tri = m.triangle(t);
  int row = 0;
  for (int i = 0; i < 3; ++i) {
    mono.values(m.vertex(tri[i]), mv);
    G.row(row++) = mv.transpose();
  }
  const QuadRule& er = edge_rule(2 * k_);
  Eigen::VectorXd leg(k_ - 1);
  for (int i = 0; i < 3; ++i) {
    const int e = m.triangle_edges(t)[i];
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k_ - 1, nm);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const double s = er.points[q].x();
      mono.values(m.edge_point(e, s), mv);
      legendre_values(k_ - 2, s, leg);
      block += er.weights[q] * leg * mv.transpose();
    }
    G.middleRows(row, k_ - 1) = block;
    row += k_ - 1;
  }
  const int ni = interior_dofs_per_element();
  if (ni > 0) {
    const QuadRule& tr = triangle_rule(2 * k_);
    const AffineMap F = element_map(m, t);
    Eigen::VectorXd qv(ni);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(ni, nm);
    for (std::size_t q = 0; q < tr.size(); ++q) {
      mono.values(F(tr.points[q]), mv);
      reference_orthonormal_values(k_ - 3, tr.points[q], qv);
      block += 2.0 * tr.weights[q] * qv * mv.transpose();
    }
    G.middleRows(row, ni) = block;
  }
  // functional_a(basis_i) = delta_ai  =>  G C^T = I.
  monos_[t] = mono;
  coeffs_[t] = G.partialPivLu().inverse().transpose();
}

void LagrangeSpace::evaluate(int t, const Vec2& x, BasisValues& out) const {
  thread_local BasisValues mv;
  monos_[t].evaluate(x, mv);
  const Eigen::MatrixXd& C = coeffs_[t];
  out.v.noalias() = C * mv.v;
  out.dx.noalias() = C * mv.dx;
  out.dy.noalias() = C * mv.dy;
  out.dxx.noalias() = C * mv.dxx;
  out.dxy.noalias() = C * mv.dxy;
  out.dyy.noalias() = C * mv.dyy;
}

Eigen::VectorXd LagrangeSpace::interpolate(const ScalarFunction& v) const {
  const Mesh& m = *mesh_;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ndofs_);
  for (int i = 0; i < m.num_vertices(); ++i) c(vertex_dof(i)) = v(m.vertex(i));
  const QuadRule& er = edge_rule(kMaxQuadratureDegree);
  Eigen::VectorXd leg(k_ - 1);
  for (int e = 0; e < m.num_edges(); ++e) {
    for (std::size_t q = 0; q < er.size(); ++q) {
      const double s = er.points[q].x();
      legendre_values(k_ - 2, s, leg);
      const double fv = v(m.edge_point(e, s));
      for (int j = 0; j < k_ - 1; ++j) c(edge_dof(e, j)) += er.weights[q] * fv * leg(j);
    }
  }
  const int ni = interior_dofs_per_element();
  if (ni > 0) {
    const QuadRule& tr = triangle_rule(kMaxQuadratureDegree);
    Eigen::VectorXd qv(ni);
    for (int t = 0; t < m.num_triangles(); ++t) {
      const AffineMap F = element_map(m, t);
      for (std::size_t q = 0; q < tr.size(); ++q) {
        reference_orthonormal_values(k_ - 3, tr.points[q], qv);
        const double fv = v(F(tr.points[q]));
        for (int r = 0; r < ni; ++r) c(interior_dof(t, r)) += 2.0 * tr.weights[q] * fv * qv(r);
      }
    }
  }
  return c;
}

ScalarField::ScalarField(LagrangeSpacePtr space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->num_dofs()) throw std::invalid_argument("ScalarField: coefficient size mismatch");
}

ScalarField ScalarField::zero(LagrangeSpacePtr space) {
  const int n = space->num_dofs();
  return ScalarField(std::move(space), Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd ScalarField::local(int t) const {
  const auto dofs = space_->element_dofs(t);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = coeffs_(dofs[i]);
  return c;
}

double ScalarField::value(int t, const Vec2& x) const {
  thread_local BasisValues bv;
  space_->evaluate(t, x, bv);
  return bv.v.dot(local(t));
}

Vec2 ScalarField::gradient(int t, const Vec2& x) const {
  thread_local BasisValues bv;
  space_->evaluate(t, x, bv);
  const Eigen::VectorXd c = local(t);
  return {bv.dx.dot(c), bv.dy.dot(c)};
}

Mat2 ScalarField::hessian(int t, const Vec2& x) const {
  thread_local BasisValues bv;
  space_->evaluate(t, x, bv);
  const Eigen::VectorXd c = local(t);
  const double xy = bv.dxy.dot(c);
  return (Mat2() << bv.dxx.dot(c), xy, xy, bv.dyy.dot(c)).finished();
}

}  // namespace kplate
