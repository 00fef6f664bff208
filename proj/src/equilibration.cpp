#include "kplate/equilibration.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "kplate/ipdg.hpp"
#include "kplate/projection.hpp"
#include "kplate/quadrature.hpp"

namespace kplate {

namespace {

// Constrained coefficients must vanish up to rounding of the field's scale
// (interpolants of admissible functions carry values like sin(pi)^2).
template <class Space>
void require_admissible(const Space& space, const Eigen::VectorXd& c, const char* what) {
  const double tol = 1e-14 * std::max(1.0, c.size() ? c.cwiseAbs().maxCoeff() : 0.0);
  for (int i = 0; i < c.size(); ++i) {
    if (space.constrained(i) && std::abs(c(i)) > tol)
      throw std::invalid_argument(std::string(what) + " violates its essential boundary conditions");
  }
}

void require_same_mesh(const Mesh& a, const Mesh& b) {
  if (&a != &b) throw std::invalid_argument("divdiv pairing: arguments live on different meshes");
}

double contract(const Mat2& a, const Mat2& b) { return (a.array() * b.array()).sum(); }

// Element-outward normal of local edge i and the counterclockwise tangent.
std::pair<Vec2, Vec2> outward_frame(const Mesh& m, int t, int e) {
  const double sign = m.edge(e).t[0] == t ? 1.0 : -1.0;
  const Vec2 n = sign * m.edge_normal(e);
  return {n, Vec2(-n.y(), n.x())};
}

}  // namespace

double divdiv_pairing_jump(const MomentField& tau, const ScalarField& v) {
  const Mesh& m = v.space().mesh();
  require_same_mesh(m, tau.space().mesh());
  require_admissible(tau.space(), tau.coeffs(), "moment tensor");
  require_admissible(v.space(), v.coeffs(), "test function");
  const int deg = 2 * v.space().order();
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (const auto& qp : element_points(m, t, deg)) s += qp.w * contract(tau.value(t, qp.x), v.hessian(t, qp.x));
  }
  const QuadRule& er = edge_rule(deg);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edge(e);
    const Vec2 n = m.edge_normal(e);
    const double h = m.edge_length(e);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const Vec2 x = m.edge_point(e, er.points[q].x());
      double jump = v.gradient(edge.t[0], x).dot(n);
      if (!edge.boundary()) jump -= v.gradient(edge.t[1], x).dot(n);
      s -= er.weights[q] * h * nn(tau.value(edge.t[0], x), n) * jump;
    }
  }
  return s;
}

double divdiv_pairing_jump(const MomentField& tau, const C1Field& v) {
  const C1Space& c1 = v.space();
  const Mesh& m = c1.mesh();
  require_same_mesh(m, tau.space().mesh());
  require_admissible(tau.space(), tau.coeffs(), "moment tensor");
  require_admissible(c1, v.coeffs(), "test function");
  const int deg = 2 * tau.space().deflection_order() + 2;
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int sub = 0; sub < 3; ++sub) {
      const auto p = c1.sub_triangle(t, sub);
      for (const auto& qp : triangle_points(p[0], p[1], p[2], deg))
        s += qp.w * contract(tau.value(t, qp.x), v.hessian(t, sub, qp.x));
    }
  }
  // Only boundary edges carry a normal-derivative jump for a C1 function.
  const QuadRule& er = edge_rule(deg);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edge(e);
    if (!edge.boundary()) continue;
    const Vec2 n = m.edge_normal(e);
    const double h = m.edge_length(e);
    const int t = edge.t[0];
    for (std::size_t q = 0; q < er.size(); ++q) {
      const Vec2 x = m.edge_point(e, er.points[q].x());
      const int sub = c1.locate(t, x);
      s -= er.weights[q] * h * nn(tau.value(t, x), n) * v.gradient(t, sub, x).dot(n);
    }
  }
  return s;
}

double divdiv_pairing_div(const MomentField& tau, const ScalarField& v) {
  const Mesh& m = v.space().mesh();
  require_same_mesh(m, tau.space().mesh());
  require_admissible(tau.space(), tau.coeffs(), "moment tensor");
  require_admissible(v.space(), v.coeffs(), "test function");
  const int deg = 2 * v.space().order();
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (const auto& qp : element_points(m, t, deg)) s -= qp.w * tau.div(t, qp.x).dot(v.gradient(t, qp.x));
  }
  const QuadRule& er = edge_rule(deg);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edge(e);
    const Vec2 n = m.edge_normal(e);
    const Vec2 tt = m.edge_tangent(e);
    const double h = m.edge_length(e);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const Vec2 x = m.edge_point(e, er.points[q].x());
      double jump = nt(tau.value(edge.t[0], x), n, tt);
      if (!edge.boundary()) jump -= nt(tau.value(edge.t[1], x), n, tt);
      s += er.weights[q] * h * jump * v.gradient(edge.t[0], x).dot(tt);
    }
  }
  return s;
}

double DistributionalLoad::edge_density(int e, double s) const {
  const Eigen::VectorXd& c = edge[e];
  if (c.size() == 0) return 0.0;
  Eigen::VectorXd leg(c.size());
  legendre_values(static_cast<int>(c.size()) - 1, s, leg);
  return leg.dot(c);
}

double DistributionalLoad::element_density(int t, const Vec2& x) const {
  const Eigen::VectorXd& c = element[t];
  if (c.size() == 0) return 0.0;
  Eigen::VectorXd mv(c.size());
  element_basis[t].values(x, mv);
  return mv.dot(c);
}

double DistributionalLoad::action(const ScalarField& v) const {
  const Mesh& m = *mesh;
  require_same_mesh(m, v.space().mesh());
  require_admissible(v.space(), v.coeffs(), "test function");
  double s = 0.0;
  // Vertex DOFs are point values.
  for (int i = 0; i < m.num_vertices(); ++i) s += vertex[i] * v.coeffs()(v.space().vertex_dof(i));
  const int deg = 2 * k;
  const QuadRule& er = edge_rule(deg);
  for (int e = 0; e < m.num_edges(); ++e) {
    const double h = m.edge_length(e);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const double sq = er.points[q].x();
      s += er.weights[q] * h * edge_density(e, sq) * v.value(m.edge(e).t[0], m.edge_point(e, sq));
    }
  }
  if (k >= 3) {
    for (int t = 0; t < m.num_triangles(); ++t) {
      for (const auto& qp : element_points(m, t, deg)) s += qp.w * element_density(t, qp.x) * v.value(t, qp.x);
    }
  }
  return s;
}

DistributionalLoad distributional_load(const MomentField& tau) {
  const HHJSpace& M = tau.space();
  const Mesh& m = M.mesh();
  const int k = M.deflection_order();
  DistributionalLoad load;
  load.mesh = M.mesh_ptr();
  load.k = k;
  load.vertex.assign(m.num_vertices(), 0.0);
  load.edge.assign(m.num_edges(), Eigen::VectorXd::Zero(k - 1));
  load.element.assign(m.num_triangles(), Eigen::VectorXd::Zero(num_monomials(k - 3)));
  load.element_basis.resize(m.num_triangles());

  const QuadRule& er = edge_rule(2 * k + 2);
  const int nq = static_cast<int>(er.size());
  std::vector<Eigen::VectorXd> samples(m.num_edges(), Eigen::VectorXd::Zero(nq));
  double elem_rem = 0.0, elem_scale = 0.0, edge_rem = 0.0, edge_scale = 0.0;

  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    for (int i = 0; i < 3; ++i) {
      const int e = m.triangle_edges(t)[i];
      const auto [n, tt] = outward_frame(m, t, e);
      for (int q = 0; q < nq; ++q) {
        const Vec2 x = m.edge_point(e, er.points[q].x());
        samples[e](q) += -nt(tau.derivative(t, x, tt), n, tt) - tau.div(t, x).dot(n);
      }
      // Counterclockwise traversal: local edge i runs from tri[i+1] to tri[i+2].
      const int a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
      load.vertex[b] += nt(tau.value(t, m.vertex(b)), n, tt);
      load.vertex[a] -= nt(tau.value(t, m.vertex(a)), n, tt);
    }

    // Element density: div div tau, fitted in degree k-3 with remainder check.
    const int deg = std::max(k - 3, 0);
    load.element_basis[t] = ScaledMonomials(deg, m.centroid(t), m.diameter(t));
    const int nm = num_monomials(k - 3);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nm, nm);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nm);
    Eigen::VectorXd mv(load.element_basis[t].size());
    const auto pts = element_points(m, t, 2 * k);
    for (const auto& qp : pts) {
      if (nm == 0) break;
      load.element_basis[t].values(qp.x, mv);
      G.noalias() += qp.w * mv * mv.transpose();
      r += qp.w * tau.divdiv(t, qp.x) * mv;
    }
    if (nm > 0) load.element[t] = G.ldlt().solve(r);
    double rem = 0.0, ref = 0.0;
    for (const auto& qp : pts) {
      const double d = tau.divdiv(t, qp.x);
      const double fit = load.element_density(t, qp.x);
      rem += qp.w * (d - fit) * (d - fit);
      ref += qp.w * d * d;
    }
    elem_rem = std::max(elem_rem, std::sqrt(rem));
    elem_scale = std::max(elem_scale, std::sqrt(ref));
  }

  Eigen::VectorXd leg(k - 1);
  for (int e = 0; e < m.num_edges(); ++e) {
    Eigen::VectorXd& c = load.edge[e];
    for (int q = 0; q < nq; ++q) {
      legendre_values(k - 2, er.points[q].x(), leg);
      c += er.weights[q] * samples[e](q) * leg;
    }
    double rem = 0.0, ref = 0.0;
    for (int q = 0; q < nq; ++q) {
      const double d = samples[e](q) - load.edge_density(e, er.points[q].x());
      rem += er.weights[q] * d * d;
      ref += er.weights[q] * samples[e](q) * samples[e](q);
    }
    edge_rem = std::max(edge_rem, std::sqrt(rem));
    edge_scale = std::max(edge_scale, std::sqrt(ref));
  }
  // Misfits relative to the largest density of each family.
  const auto rel = [](double r, double s) { return s > 0.0 ? r / s : r; };
  load.remainder = std::max(rel(elem_rem, elem_scale), rel(edge_rem, edge_scale));
  return load;
}

double divdiv_pairing_vertexform(const MomentField& tau, const ScalarField& v) {
  require_same_mesh(v.space().mesh(), tau.space().mesh());
  require_admissible(tau.space(), tau.coeffs(), "moment tensor");
  return distributional_load(tau).action(v);
}

Eigen::VectorXd divdiv_vector(const MomentField& tau, const LagrangeSpace& space) {
  const Mesh& m = space.mesh();
  require_same_mesh(m, tau.space().mesh());
  const int deg = 2 * space.order();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(space.num_dofs());
  BasisValues bv;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto dofs = space.element_dofs(t);
    Eigen::VectorXd loc = Eigen::VectorXd::Zero(dofs.size());
    for (const auto& qp : element_points(m, t, deg)) {
      space.evaluate(t, qp.x, bv);
      const Mat2 s = tau.value(t, qp.x);
      loc += qp.w * (s(0, 0) * bv.dxx + 2.0 * s(0, 1) * bv.dxy + s(1, 1) * bv.dyy);
    }
    for (std::size_t i = 0; i < dofs.size(); ++i) r(dofs[i]) += loc(i);
  }
  const QuadRule& er = edge_rule(deg);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edge(e);
    const Vec2 n = m.edge_normal(e);
    const double h = m.edge_length(e);
    for (int side = 0; side < (edge.boundary() ? 1 : 2); ++side) {
      const int t = edge.t[side];
      const double sign = side == 0 ? 1.0 : -1.0;
      const auto dofs = space.element_dofs(t);
      Eigen::VectorXd loc = Eigen::VectorXd::Zero(dofs.size());
      for (std::size_t q = 0; q < er.size(); ++q) {
        const Vec2 x = m.edge_point(e, er.points[q].x());
        space.evaluate(t, x, bv);
        loc -= er.weights[q] * h * sign * nn(tau.value(edge.t[0], x), n) * (n.x() * bv.dx + n.y() * bv.dy);
      }
      for (std::size_t i = 0; i < dofs.size(); ++i) r(dofs[i]) += loc(i);
    }
  }
  return r;
}

EquilibrationCheck check_equilibration(const MomentField& tau, const LagrangeSpace& space, const ScalarFunction& f,
                                       const std::optional<Vec2>& singular) {
  const Mesh& m = space.mesh();
  const int deg = 2 * space.order() + 6;
  const Eigen::VectorXd F = load_vector(space, f, deg, singular);
  const Eigen::VectorXd D = divdiv_vector(tau, space);
  double worst = 0.0;
  for (int d : space.free_dofs()) worst = std::max(worst, std::abs(D(d) - F(d)));
  double fn = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (const auto& qp : element_points(m, t, std::min(deg, kMaxQuadratureDegree), singular)) {
      const double v = f(qp.x);
      fn += qp.w * v * v;
    }
  }
  return {worst, 1e-9 * (1.0 + std::sqrt(fn))};
}

MomentField equilibrated_tensor(const ScalarField& uh, double alpha) {
  const LagrangeSpace& V = uh.space();
  const Mesh& m = V.mesh();
  const int k = V.order();
  auto M = std::make_shared<const HHJSpace>(V.mesh_ptr(), k);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(M->num_dofs());

  const QuadRule& er = edge_rule(2 * k);
  Eigen::VectorXd leg(k);
  // Normal-derivative jump of u_h and the averaged normal-normal Hessian at
  // the edge quadrature points.
  auto edge_data = [&](int e, const Vec2& x, double& jump, double& avg) {
    const Edge& edge = m.edge(e);
    const Vec2 n = m.edge_normal(e);
    jump = uh.gradient(edge.t[0], x).dot(n);
    avg = nn(uh.hessian(edge.t[0], x), n);
    if (!edge.boundary()) {
      jump -= uh.gradient(edge.t[1], x).dot(n);
      avg = 0.5 * (avg + nn(uh.hessian(edge.t[1], x), n));
    }
  };

  for (int e = 0; e < m.num_edges(); ++e) {
    if (!penalized_edge(m, e)) continue;  // sigma_nn = 0 on simply supported / free edges
    const double h = m.edge_length(e);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const double s = er.points[q].x();
      double jump, avg;
      edge_data(e, m.edge_point(e, s), jump, avg);
      legendre_values(k - 1, s, leg);
      const double g = avg - alpha / h * jump;
      for (int j = 0; j < k; ++j) c(M->edge_dof(e, j)) += er.weights[q] * g * leg(j);
    }
  }

  const int nq = M->interior_scalar_tests();
  if (nq > 0) {
    const QuadRule& tr = triangle_rule(2 * k);
    Eigen::VectorXd qv(nq);
    for (int t = 0; t < m.num_triangles(); ++t) {
      const AffineMap F = element_map(m, t);
      const double area = m.area(t);
      for (std::size_t q = 0; q < tr.size(); ++q) {
        reference_orthonormal_values(k - 2, tr.points[q], qv);
        const Mat2 H = uh.hessian(t, F(tr.points[q]));
        for (int cc = 0; cc < 3; ++cc) {
          const double hc = contract(H, HHJSpace::test_tensor(cc, 1.0));
          for (int r = 0; r < nq; ++r) c(M->interior_dof(t, cc, r)) += 2.0 * tr.weights[q] * hc * qv(r);
        }
      }
      for (int i = 0; i < 3; ++i) {
        const int e = m.triangle_edges(t)[i];
        if (!penalized_edge(m, e)) continue;
        const double gamma = m.edge(e).boundary() ? 1.0 : 0.5;
        const Vec2 n = m.edge_normal(e);
        const double h = m.edge_length(e);
        for (std::size_t q = 0; q < er.size(); ++q) {
          const Vec2 x = m.edge_point(e, er.points[q].x());
          double jump, avg;
          edge_data(e, x, jump, avg);
          reference_orthonormal_values(k - 2, F.inverse(x), qv);
          for (int cc = 0; cc < 3; ++cc) {
            const double snn = nn(HHJSpace::test_tensor(cc, 1.0), n);
            for (int r = 0; r < nq; ++r)
              c(M->interior_dof(t, cc, r)) -= gamma * er.weights[q] * h / area * jump * snn * qv(r);
          }
        }
      }
    }
  }
  return MomentField(M, std::move(c));
}

EquilibratedTensor equilibrate_from_dg(const ScalarField& uh, double alpha, const ScalarFunction& f,
                                       const std::optional<Vec2>& singular) {
  MomentField sigma = equilibrated_tensor(uh, alpha);
  const EquilibrationCheck check = check_equilibration(sigma, uh.space(), f, singular);
  if (!check.passed())
    throw EquilibrationError("equilibration identity violated (worst basis residual " +
                                 std::to_string(check.residual) + ")",
                             check.residual);
  return {std::move(sigma), check};
}

}  // namespace kplate
