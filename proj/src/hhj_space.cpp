#include "kplate/hhj_space.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

#include "kplate/quadrature.hpp"

namespace kplate {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// tau : S_c for tau = m * E_d (raw basis component d, scalar m = 1).
double raw_dot_test(int d, int c) {
  if (d != c) return 0.0;
  return d == 1 ? 2.0 * kInvSqrt2 : 1.0;
}

// n^T E_d n
double raw_nn(int d, const Vec2& n) {
  switch (d) {
    case 0:
      return n.x() * n.x();
    case 1:
      return 2.0 * n.x() * n.y();
    default:
      return n.y() * n.y();
  }
}

}  // namespace

Mat2 HHJSpace::test_tensor(int c, double q) {
  Mat2 S = Mat2::Zero();
  switch (c) {
    case 0:
      S(0, 0) = q;
      break;
    case 1:
      S(0, 1) = S(1, 0) = q * kInvSqrt2;
      break;
    default:
      S(1, 1) = q;
  }
  return S;
}

HHJSpace::HHJSpace(MeshPtr mesh, int k) : mesh_(std::move(mesh)), k_(k) {
  if (k_ < 2 || k_ > 6) throw std::invalid_argument("HHJSpace: deflection order must lie in [2, 6]");
  const Mesh& m = *mesh_;
  const int ni = 3 * interior_scalar_tests();
  nloc_ = 3 * k_ + ni;
  ndofs_ = m.num_edges() * k_ + m.num_triangles() * ni;
  dofs_.resize(static_cast<std::size_t>(m.num_triangles()) * nloc_);
  for (int t = 0; t < m.num_triangles(); ++t) {
    int* d = dofs_.data() + static_cast<std::size_t>(t) * nloc_;
    int pos = 0;
    for (int i = 0; i < 3; ++i) {
      for (int q = 0; q < k_; ++q) d[pos++] = edge_dof(m.triangle_edges(t)[i], q);
    }
    for (int c = 0; c < 3; ++c) {
      for (int r = 0; r < interior_scalar_tests(); ++r) d[pos++] = interior_dof(t, c, r);
    }
  }

  free_index_.assign(ndofs_, -1);
  std::vector<char> fixed(ndofs_, 0);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.edge(e).boundary() || m.boundary_kind(e) == BoundaryKind::Clamped) continue;
    for (int q = 0; q < k_; ++q) fixed[edge_dof(e, q)] = 1;
  }
  for (int i = 0; i < ndofs_; ++i) {
    if (fixed[i]) continue;
    free_index_[i] = static_cast<int>(free_dofs_.size());
    free_dofs_.push_back(i);
  }

  monos_.resize(m.num_triangles());
  coeffs_.resize(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) build_element(t);
}

void HHJSpace::build_element(int t) {
  const Mesh& m = *mesh_;
  const ScaledMonomials mono(k_ - 1, m.centroid(t), m.diameter(t));
  const int nm = mono.size();
  if (3 * nm != nloc_) throw std::logic_error("HHJSpace: DOF count mismatch");
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nloc_, 3 * nm);
  Eigen::VectorXd mv(nm);

  const QuadRule& er = edge_rule(2 * k_);
  Eigen::VectorXd leg(k_);
  int row = 0;
  for (int i = 0; i < 3; ++i) {
    const int e = m.triangle_edges(t)[i];
    const Vec2 n = m.edge_normal(e);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const double s = er.points[q].x();
      mono.values(m.edge_point(e, s), mv);
      legendre_values(k_ - 1, s, leg);
      for (int d = 0; d < 3; ++d) {
        G.block(row, d * nm, k_, nm) += er.weights[q] * raw_nn(d, n) * leg * mv.transpose();
      }
    }
    row += k_;
  }
  const int nq = interior_scalar_tests();
  const QuadRule& tr = triangle_rule(2 * k_);
  const AffineMap F = element_map(m, t);
  Eigen::VectorXd qv(nq);
  for (std::size_t q = 0; q < tr.size(); ++q) {
    mono.values(F(tr.points[q]), mv);
    reference_orthonormal_values(k_ - 2, tr.points[q], qv);
    for (int c = 0; c < 3; ++c) {
      G.block(row + c * nq, c * nm, nq, nm) +=
          2.0 * tr.weights[q] * raw_dot_test(c, c) * qv * mv.transpose();
    }
  }
  monos_[t] = mono;
  coeffs_[t] = G.partialPivLu().inverse().transpose();
}

void HHJSpace::evaluate(int t, const Vec2& x, TensorBasisValues& out) const {
  thread_local BasisValues mv;
  monos_[t].evaluate(x, mv);
  const Eigen::MatrixXd& C = coeffs_[t];
  const int nm = monos_[t].size();
  for (int c = 0; c < 3; ++c) {
    const auto block = C.middleCols(c * nm, nm);
    BasisValues& o = out.comp[c];
    o.v.noalias() = block * mv.v;
    o.dx.noalias() = block * mv.dx;
    o.dy.noalias() = block * mv.dy;
    o.dxx.noalias() = block * mv.dxx;
    o.dxy.noalias() = block * mv.dxy;
    o.dyy.noalias() = block * mv.dyy;
  }
}

Eigen::VectorXd HHJSpace::interpolate(const TensorFunction& tau) const {
  const Mesh& m = *mesh_;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ndofs_);
  const QuadRule& er = edge_rule(kMaxQuadratureDegree);
  Eigen::VectorXd leg(k_);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 n = m.edge_normal(e);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const double s = er.points[q].x();
      legendre_values(k_ - 1, s, leg);
      const double g = nn(tau(m.edge_point(e, s)), n);
      for (int j = 0; j < k_; ++j) c(edge_dof(e, j)) += er.weights[q] * g * leg(j);
    }
  }
  const int nq = interior_scalar_tests();
  const QuadRule& tr = triangle_rule(kMaxQuadratureDegree);
  Eigen::VectorXd qv(nq);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const AffineMap F = element_map(m, t);
    for (std::size_t q = 0; q < tr.size(); ++q) {
      reference_orthonormal_values(k_ - 2, tr.points[q], qv);
      const Mat2 val = tau(F(tr.points[q]));
      for (int cc = 0; cc < 3; ++cc) {
        for (int r = 0; r < nq; ++r)
          c(interior_dof(t, cc, r)) += 2.0 * tr.weights[q] * (val.array() * test_tensor(cc, qv(r)).array()).sum();
      }
    }
  }
  return c;
}

MomentField::MomentField(HHJSpacePtr space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->num_dofs()) throw std::invalid_argument("MomentField: coefficient size mismatch");
}

MomentField MomentField::zero(HHJSpacePtr space) {
  const int n = space->num_dofs();
  return MomentField(std::move(space), Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd MomentField::local(int t) const {
  const auto dofs = space_->element_dofs(t);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = coeffs_(dofs[i]);
  return c;
}

Mat2 MomentField::value(int t, const Vec2& x) const {
  thread_local TensorBasisValues tb;
  space_->evaluate(t, x, tb);
  const Eigen::VectorXd c = local(t);
  const double xy = tb.comp[1].v.dot(c);
  return (Mat2() << tb.comp[0].v.dot(c), xy, xy, tb.comp[2].v.dot(c)).finished();
}

Vec2 MomentField::div(int t, const Vec2& x) const {
  thread_local TensorBasisValues tb;
  space_->evaluate(t, x, tb);
  const Eigen::VectorXd c = local(t);
  return {tb.comp[0].dx.dot(c) + tb.comp[1].dy.dot(c), tb.comp[1].dx.dot(c) + tb.comp[2].dy.dot(c)};
}

double MomentField::divdiv(int t, const Vec2& x) const {
  thread_local TensorBasisValues tb;
  space_->evaluate(t, x, tb);
  const Eigen::VectorXd c = local(t);
  return tb.comp[0].dxx.dot(c) + 2.0 * tb.comp[1].dxy.dot(c) + tb.comp[2].dyy.dot(c);
}

Mat2 MomentField::derivative(int t, const Vec2& x, const Vec2& dir) const {
  thread_local TensorBasisValues tb;
  space_->evaluate(t, x, tb);
  const Eigen::VectorXd c = local(t);
  auto comp = [&](int i) { return dir.x() * tb.comp[i].dx.dot(c) + dir.y() * tb.comp[i].dy.dot(c); };
  const double xy = comp(1);
  return (Mat2() << comp(0), xy, xy, comp(2)).finished();
}

}  // namespace kplate
