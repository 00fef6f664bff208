#include "kplate/c1_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>

namespace kplate {

namespace {

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

double min_barycentric(const std::array<Vec2, 3>& p, const Vec2& x) {
  const Mat2 J = (Mat2() << p[1] - p[0], p[2] - p[0]).finished();
  const Vec2 l = J.inverse() * (x - p[0]);
  return std::min({1.0 - l.x() - l.y(), l.x(), l.y()});
}

}  // namespace

C1Space::C1Space(MeshPtr mesh, C1Variant variant) : mesh_(std::move(mesh)), variant_(variant) {
  const Mesh& m = *mesh_;
  const bool full = variant_ == C1Variant::FullCT;
  nloc_ = full ? 12 : 9;
  ndofs_ = 3 * m.num_vertices() + (full ? m.num_edges() : 0);
  build_frames();

  dofs_.resize(static_cast<std::size_t>(m.num_triangles()) * nloc_);
  for (int t = 0; t < m.num_triangles(); ++t) {
    int* d = dofs_.data() + static_cast<std::size_t>(t) * nloc_;
    const auto& tri = m.triangle(t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) d[3 * i + j] = 3 * tri[i] + j;
    }
    if (full) {
      for (int i = 0; i < 3; ++i) d[9 + i] = 3 * m.num_vertices() + m.triangle_edges(t)[i];
    }
  }

  std::vector<char> fixed(ndofs_, 0);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const bool clamped = m.vertex_touches(v, BoundaryKind::Clamped);
    const bool supported = m.vertex_touches(v, BoundaryKind::SimplySupported);
    if (!clamped && !supported) continue;
    fixed[3 * v] = 1;
    // Directions along which the gradient must vanish.
    std::vector<Vec2> dirs;
    for (int e : m.vertex_edges(v)) {
      if (!m.edge(e).boundary()) continue;
      const BoundaryKind kind = m.boundary_kind(e);
      if (kind == BoundaryKind::Free) continue;
      dirs.push_back(m.edge_tangent(e));
      if (kind == BoundaryKind::Clamped) dirs.push_back(m.edge_normal(e));
    }
    bool rank2 = false;
    for (const auto& d : dirs) rank2 = rank2 || std::abs(dirs.front().x() * d.y() - dirs.front().y() * d.x()) > 1e-8;
    fixed[3 * v + 1] = 1;
    if (rank2) fixed[3 * v + 2] = 1;
  }
  if (full) {
    for (int e = 0; e < m.num_edges(); ++e) {
      if (m.edge(e).boundary() && m.boundary_kind(e) == BoundaryKind::Clamped) fixed[3 * m.num_vertices() + e] = 1;
    }
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

void C1Space::build_frames() {
  const Mesh& m = *mesh_;
  frames_.assign(m.num_vertices(), Mat2::Identity());
  vscale_.assign(m.num_vertices(), std::numeric_limits<double>::max());
  for (int e = 0; e < m.num_edges(); ++e) {
    const double h = m.edge_length(e);
    for (int v : m.edge(e).v) vscale_[v] = std::min(vscale_[v], h);
  }
  for (int v = 0; v < m.num_vertices(); ++v) {
    // A vertex on a single straight simply supported segment keeps one free
    // gradient direction (the normal); align e1 with the boundary tangent.
    std::vector<Vec2> dirs;
    for (int e : m.vertex_edges(v)) {
      if (!m.edge(e).boundary()) continue;
      const BoundaryKind kind = m.boundary_kind(e);
      if (kind == BoundaryKind::Free) continue;
      dirs.push_back(m.edge_tangent(e));
      if (kind == BoundaryKind::Clamped) dirs.push_back(m.edge_normal(e));
    }
    if (dirs.empty()) continue;
    bool rank2 = false;
    for (const auto& d : dirs) rank2 = rank2 || std::abs(dirs.front().x() * d.y() - dirs.front().y() * d.x()) > 1e-8;
    if (rank2) continue;
    const Vec2 e1 = dirs.front();
    frames_[v] << e1, perp(e1);
  }
}

std::array<Vec2, 3> C1Space::sub_triangle(int t, int sub) const {
  const Mesh& m = *mesh_;
  const auto& tri = m.triangle(t);
  return {m.vertex(tri[(sub + 1) % 3]), m.vertex(tri[(sub + 2) % 3]), m.centroid(t)};
}

int C1Space::locate(int t, const Vec2& x) const {
  int best = 0;
  double best_val = -std::numeric_limits<double>::max();
  for (int s = 0; s < 3; ++s) {
    const double b = min_barycentric(sub_triangle(t, s), x);
    if (b > best_val + 1e-14) {
      best_val = b;
      best = s;
    }
  }
  return best;
}

void C1Space::build_element(int t) {
  const Mesh& m = *mesh_;
  const bool full = variant_ == C1Variant::FullCT;
  const auto& tri = m.triangle(t);
  const Vec2 c = m.centroid(t);
  const Vec2 p[3] = {m.vertex(tri[0]), m.vertex(tri[1]), m.vertex(tri[2])};
  const ScaledMonomials mono(3, c, m.diameter(t));
  constexpr int nm = 10;
  constexpr int nu = 3 * nm;

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<int> rhs;  // -1: homogeneous, otherwise local DOF index
  BasisValues bv;
  auto add_row = [&](int sub, const Eigen::VectorXd& vals, double scale, int sub2 = -1,
                     const Eigen::VectorXd* vals2 = nullptr, int dof = -1) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nu);
    r.segment(sub * nm, nm) = scale * vals.transpose();
    if (sub2 >= 0) r.segment(sub2 * nm, nm) -= scale * vals2->transpose();
    rows.push_back(r);
    rhs.push_back(dof);
  };

  // C1 continuity across the three internal edges c -> p_i.
  for (int i = 0; i < 3; ++i) {
    const int sa = (i + 1) % 3, sb = (i + 2) % 3;
    const Vec2 nu_dir = perp(p[i] - c).normalized();
    for (double s : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
      mono.evaluate(c + s * (p[i] - c), bv);
      const Eigen::VectorXd dn = nu_dir.x() * bv.dx + nu_dir.y() * bv.dy;
      add_row(sa, bv.v, 1.0, sb, &bv.v);
      add_row(sa, dn, 1.0, sb, &dn);
    }
  }
  // Reduced variant: the normal derivative along each outer edge is linear.
  if (!full) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = p[(i + 1) % 3], b = p[(i + 2) % 3];
      const Vec2 n = perp(b - a).normalized();
      Eigen::VectorXd r = Eigen::VectorXd::Zero(nm);
      mono.evaluate(0.5 * (a + b), bv);
      r += n.x() * bv.dx + n.y() * bv.dy;
      mono.evaluate(a, bv);
      r -= 0.5 * (n.x() * bv.dx + n.y() * bv.dy);
      mono.evaluate(b, bv);
      r -= 0.5 * (n.x() * bv.dx + n.y() * bv.dy);
      add_row(i, r, 1.0);
    }
  }
  // DOF functionals.
  for (int i = 0; i < 3; ++i) {
    const int sub = (i + 1) % 3;
    const int v = tri[i];
    mono.evaluate(p[i], bv);
    add_row(sub, bv.v, 1.0, -1, nullptr, 3 * i);
    for (int j = 0; j < 2; ++j) {
      const Vec2 d = frames_[v].col(j);
      const Eigen::VectorXd g = d.x() * bv.dx + d.y() * bv.dy;
      add_row(sub, g, vscale_[v], -1, nullptr, 3 * i + 1 + j);
    }
  }
  if (full) {
    for (int i = 0; i < 3; ++i) {
      const int e = m.triangle_edges(t)[i];
      const Vec2 n = m.edge_normal(e);
      mono.evaluate(m.edge_point(e, 0.5), bv);
      const Eigen::VectorXd g = n.x() * bv.dx + n.y() * bv.dy;
      add_row(i, g, m.edge_length(e), -1, nullptr, 9 + i);
    }
  }

  Eigen::MatrixXd A(rows.size(), nu);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(rows.size(), nloc_);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(r) = rows[r];
    if (rhs[r] >= 0) R(r, rhs[r]) = 1.0;
  }
  const Eigen::MatrixXd X = A.colPivHouseholderQr().solve(R);
  construction_residual_ = std::max(construction_residual_, (A * X - R).cwiseAbs().maxCoeff());
  monos_[t] = mono;
  for (int s = 0; s < 3; ++s) coeffs_[t][s] = X.middleRows(s * nm, nm).transpose();
}

void C1Space::evaluate(int t, int sub, const Vec2& x, BasisValues& out) const {
  thread_local BasisValues mv;
  monos_[t].evaluate(x, mv);
  const Eigen::MatrixXd& C = coeffs_[t][sub];
  out.v.noalias() = C * mv.v;
  out.dx.noalias() = C * mv.dx;
  out.dy.noalias() = C * mv.dy;
  out.dxx.noalias() = C * mv.dxx;
  out.dxy.noalias() = C * mv.dxy;
  out.dyy.noalias() = C * mv.dyy;
}

C1Field::C1Field(C1SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->num_dofs()) throw std::invalid_argument("C1Field: coefficient size mismatch");
}

Eigen::VectorXd C1Field::local(int t) const {
  const auto dofs = space_->element_dofs(t);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = coeffs_(dofs[i]);
  return c;
}

double C1Field::value(int t, int sub, const Vec2& x) const {
  thread_local BasisValues bv;
  space_->evaluate(t, sub, x, bv);
  return bv.v.dot(local(t));
}

Vec2 C1Field::gradient(int t, int sub, const Vec2& x) const {
  thread_local BasisValues bv;
  space_->evaluate(t, sub, x, bv);
  const Eigen::VectorXd c = local(t);
  return {bv.dx.dot(c), bv.dy.dot(c)};
}

Mat2 C1Field::hessian(int t, int sub, const Vec2& x) const {
  thread_local BasisValues bv;
  space_->evaluate(t, sub, x, bv);
  const Eigen::VectorXd c = local(t);
  const double xy = bv.dxy.dot(c);
  return (Mat2() << bv.dxx.dot(c), xy, xy, bv.dyy.dot(c)).finished();
}

}  // namespace kplate
