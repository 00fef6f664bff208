#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "kplate/benchmarks.hpp"
#include "kplate/equilibration.hpp"
#include "kplate/ipdg.hpp"
#include "kplate/projection.hpp"
#include "kplate/quadrature.hpp"
#include "support.hpp"

using namespace kplate;
using kplate::testing::share;

namespace {

MeshPtr irregular_lshape() { return share(refine(make_lshape_mesh(2), std::vector<int>{1, 7, 12}).mesh); }

MeshPtr mixed_square(int n) { return share(make_square_mesh(n, timoshenko_mixed_case().spec)); }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

Mat2 poly_tensor(const Vec2& x, int degree) {
  const double X = x.x(), Y = x.y();
  if (degree == 1) return (Mat2() << 1 + 2 * X - Y, 0.5 * X + Y, 0.5 * X + Y, -3 + X - 4 * Y).finished();
  return (Mat2() << X * X - Y, X * Y + 2 * Y * Y, X * Y + 2 * Y * Y, 3 * X * X - X * Y).finished();
}

ScalarField solve_on(const MeshPtr& m, int k, double alpha, const ScalarFunction& f,
                     const std::optional<Vec2>& singular = std::nullopt) {
  IPDGProblem p;
  p.mesh = m;
  p.k = k;
  p.alpha = alpha;
  p.f = f;
  p.singular = singular;
  return solve(p);
}

}  // namespace

TEST(DivDivPairing, ConstantTensorPairsToZero) {
  std::mt19937 rng(1);
  const MeshPtr m = irregular_lshape();
  for (int k : {2, 3}) {
    const auto M = std::make_shared<const HHJSpace>(m, k);
    const auto V = std::make_shared<const LagrangeSpace>(m, k);
    const MomentField tau(M, M->interpolate([](const Vec2&) { return (Mat2() << 1.5, -0.7, -0.7, 2.0).finished(); }));
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField v = kplate::testing::random_scalar(V, rng);
      EXPECT_NEAR(divdiv_pairing_jump(tau, v), 0.0, 1e-11);
      EXPECT_NEAR(divdiv_pairing_div(tau, v), 0.0, 1e-11);
      EXPECT_NEAR(divdiv_pairing_vertexform(tau, v), 0.0, 1e-11);
    }
    // Charges on clamped boundary vertices and edges act on v = 0 only.
    const DistributionalLoad load = distributional_load(tau);
    for (int v = 0; v < m->num_vertices(); ++v) {
      if (!m->vertex_touches(v, BoundaryKind::Clamped)) {
        EXPECT_NEAR(load.vertex[v], 0.0, 1e-11);
      }
    }
    for (int e = 0; e < m->num_edges(); ++e) {
      if (!m->edge(e).boundary()) {
        EXPECT_LE(load.edge[e].size() ? load.edge[e].cwiseAbs().maxCoeff() : 0.0, 1e-11);
      }
    }
    for (const auto& ft : load.element) EXPECT_LE(ft.size() ? ft.cwiseAbs().maxCoeff() : 0.0, 1e-11);
  }
}

TEST(DivDivPairing, SmoothTensorHasNoEdgeOrVertexCharges) {
  const MeshPtr m = irregular_lshape();
  for (int degree : {1, 2}) {
    const auto M = std::make_shared<const HHJSpace>(m, degree + 1);
    const MomentField tau(M, M->interpolate([&](const Vec2& x) { return poly_tensor(x, degree); }));
    const DistributionalLoad load = distributional_load(tau);
    for (int v = 0; v < m->num_vertices(); ++v) {
      if (!m->vertex_touches(v, BoundaryKind::Clamped)) {
        EXPECT_NEAR(load.vertex[v], 0.0, 1e-11) << "vertex " << v;
      }
    }
    for (int e = 0; e < m->num_edges(); ++e) {
      if (m->edge(e).boundary()) continue;
      for (double s : {0.0, 0.4, 1.0}) EXPECT_NEAR(load.edge_density(e, s), 0.0, 1e-11);
    }
    // div div of the quadratic tensor is 2 + 2*1 + 0 = 4; of the linear one 0.
    const double want = degree == 2 ? 4.0 : 0.0;
    for (int t = 0; t < m->num_triangles(); ++t) EXPECT_NEAR(load.element_density(t, m->centroid(t)), want, 1e-10);
  }
}

TEST(DivDivPairing, C1FunctionsSeeOnlyElementTerms) {
  std::mt19937 rng(7);
  const MeshPtr m = irregular_lshape();
  for (auto [variant, k] : {std::pair{C1Variant::ReducedHCT, 2}, std::pair{C1Variant::FullCT, 3}}) {
    const auto M = std::make_shared<const HHJSpace>(m, k);
    const auto C = std::make_shared<const C1Space>(m, variant);
    const MomentField tau = kplate::testing::random_moment(M, rng);
    const C1Field w = kplate::testing::random_c1(C, rng);
    double direct = 0.0;
    for (int t = 0; t < m->num_triangles(); ++t) {
      for (int sub = 0; sub < 3; ++sub) {
        const auto p = C->sub_triangle(t, sub);
        for (const auto& q : triangle_points(p[0], p[1], p[2], 2 * k)) {
          direct += q.w * tau.value(t, q.x).cwiseProduct(w.hessian(t, sub, q.x)).sum();
        }
      }
    }
    EXPECT_LE(rel(divdiv_pairing_jump(tau, w), direct), 1e-11);
  }
}

TEST(DivDivPairing, BasisPairsAgreeAcrossRepresentations) {
  std::mt19937 rng(31);
  for (const MeshPtr& m : {irregular_lshape(), mixed_square(3)}) {
    for (int k : {2, 3}) {
      const auto M = std::make_shared<const HHJSpace>(m, k);
      const auto V = std::make_shared<const LagrangeSpace>(m, k);
      std::uniform_int_distribution<int> pm(0, M->num_free() - 1), pv(0, V->num_free() - 1);
      for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd ct = Eigen::VectorXd::Zero(M->num_dofs()), cv = Eigen::VectorXd::Zero(V->num_dofs());
        ct(M->free_dofs()[pm(rng)]) = 1.0;
        cv(V->free_dofs()[pv(rng)]) = 1.0;
        const MomentField tau(M, ct);
        const ScalarField v(V, cv);
        const double j = divdiv_pairing_jump(tau, v);
        EXPECT_NEAR(divdiv_pairing_vertexform(tau, v), j, 1e-11 * std::max(1.0, std::abs(j)));
        EXPECT_NEAR(divdiv_pairing_div(tau, v), j, 1e-11 * std::max(1.0, std::abs(j)));
      }
    }
  }
}

TEST(DivDivPairing, RandomPairsAgreeAcrossRepresentations) {
  std::mt19937 rng(37);
  for (const MeshPtr& m : {irregular_lshape(), mixed_square(4)}) {
    for (int k : {2, 3, 4}) {
      const auto M = std::make_shared<const HHJSpace>(m, k);
      const auto V = std::make_shared<const LagrangeSpace>(m, k);
      for (int trial = 0; trial < 5; ++trial) {
        const MomentField tau = kplate::testing::random_moment(M, rng);
        const ScalarField v = kplate::testing::random_scalar(V, rng);
        const double j = divdiv_pairing_jump(tau, v);
        EXPECT_LE(rel(divdiv_pairing_vertexform(tau, v), j), 1e-11);
        EXPECT_LE(rel(divdiv_pairing_div(tau, v), j), 1e-11);
        EXPECT_LE(rel(distributional_load(tau).action(v), j), 1e-11);
      }
    }
  }
}

TEST(DivDivPairing, InadmissibleArgumentsAreRejected) {
  const MeshPtr m = share(make_square_mesh(2));
  const auto M = std::make_shared<const HHJSpace>(m, 2);
  const auto V = std::make_shared<const LagrangeSpace>(m, 2);
  const MomentField tau = MomentField::zero(M);
  const ScalarField one = interpolate_Ih(V, [](const Vec2&) { return 1.0; });
  EXPECT_THROW(divdiv_pairing_jump(tau, one), std::invalid_argument);
  EXPECT_THROW(divdiv_pairing_vertexform(tau, one), std::invalid_argument);

  // A moment field with nonzero normal-normal trace on a free edge.
  const MeshPtr mm = mixed_square(2);
  const auto Mm = std::make_shared<const HHJSpace>(mm, 2);
  const MomentField bad(Mm, Eigen::VectorXd::Ones(Mm->num_dofs()));
  EXPECT_THROW(divdiv_pairing_jump(bad, ScalarField::zero(std::make_shared<const LagrangeSpace>(mm, 2))),
               std::invalid_argument);

  // Arguments on different meshes.
  const auto other = std::make_shared<const LagrangeSpace>(share(make_square_mesh(2)), 2);
  EXPECT_THROW(divdiv_pairing_jump(tau, ScalarField::zero(other)), std::invalid_argument);
}

TEST(DistributionalLoad, LowestOrderHasNoElementDensity) {
  std::mt19937 rng(41);
  const MeshPtr m = irregular_lshape();
  const auto M = std::make_shared<const HHJSpace>(m, 2);
  const DistributionalLoad load = distributional_load(kplate::testing::random_moment(M, rng));
  for (int t = 0; t < m->num_triangles(); ++t) {
    EXPECT_EQ(load.element_density(t, m->centroid(t)), 0.0);
    EXPECT_EQ(load.element[t].size(), 0);
  }
  EXPECT_LE(load.remainder, 1e-11);
}

TEST(DistributionalLoad, ActionMatchesPairingOnEveryBasisFunction) {
  std::mt19937 rng(43);
  for (const MeshPtr& m : {irregular_lshape(), mixed_square(3)}) {
    for (int k : {2, 3}) {
      const auto M = std::make_shared<const HHJSpace>(m, k);
      const auto V = std::make_shared<const LagrangeSpace>(m, k);
      const MomentField tau = kplate::testing::random_moment(M, rng);
      const DistributionalLoad load = distributional_load(tau);
      EXPECT_LE(load.remainder, 1e-10);
      const Eigen::VectorXd pair = divdiv_vector(tau, *V);
      double worst = 0.0;
      for (int dof : V->free_dofs()) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(V->num_dofs());
        c(dof) = 1.0;
        const ScalarField phi(V, c);
        worst = std::max(worst, std::abs(load.action(phi) - divdiv_pairing_jump(tau, phi)));
        worst = std::max(worst, std::abs(pair(dof) - divdiv_pairing_jump(tau, phi)));
      }
      EXPECT_LE(worst, 1e-11);
    }
  }
}

TEST(DivDivPairing, InvariantUnderEdgeReversal) {
  const BenchmarkCase bench = smooth_manufactured_case();
  const Mesh base = make_square_mesh(3);
  int e = 0;
  while (base.edge(e).boundary()) ++e;
  const MeshPtr a = share(base), b = share(base.with_reversed_edge(e));
  auto tensor = [](const Vec2& x) {
    return (Mat2() << std::sin(x.x() + 2 * x.y()), x.x() * x.y(), x.x() * x.y(), std::cos(3 * x.x())).finished();
  };
  for (int k : {2, 3}) {
    double values[2][3];
    int i = 0;
    for (const MeshPtr& m : {a, b}) {
      const auto M = std::make_shared<const HHJSpace>(m, k);
      const auto V = std::make_shared<const LagrangeSpace>(m, k);
      const MomentField tau(M, M->interpolate(tensor));
      const ScalarField v = interpolate_Ih(V, bench.exact->u);
      values[i][0] = divdiv_pairing_jump(tau, v);
      values[i][1] = divdiv_pairing_vertexform(tau, v);
      values[i][2] = distributional_load(tau).action(v);
      ++i;
    }
    for (int j = 0; j < 3; ++j) EXPECT_LE(rel(values[0][j], values[1][j]), 1e-12) << "k=" << k << " form " << j;
  }
}

TEST(Equilibration, ZeroLoadGivesZeroTensor) {
  const MeshPtr m = share(make_square_mesh(3));
  const ScalarField uh = solve_on(m, 2, 9.0, [](const Vec2&) { return 0.0; });
  const EquilibratedTensor eq = equilibrate_from_dg(uh, 9.0, [](const Vec2&) { return 0.0; });
  EXPECT_EQ(eq.sigma.coeffs().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(eq.check.passed());
}

TEST(Equilibration, ClampedSquareUnitLoad) {
  const MeshPtr m = share(make_square_mesh(4));
  const ScalarFunction f = [](const Vec2&) { return 1.0; };
  const ScalarField uh = solve_on(m, 2, 9.0, f);
  const EquilibratedTensor eq = equilibrate_from_dg(uh, 9.0, f);
  // ||1||_0 = 1 on the unit square.
  EXPECT_NEAR(eq.check.tolerance, 2e-9, 1e-15);
  EXPECT_LE(eq.check.residual, 1e-9 * 2.0);
  // Independent recomputation of the identity over all basis functions.
  const Eigen::VectorXd lhs = divdiv_vector(eq.sigma, uh.space());
  const Eigen::VectorXd rhs = load_vector(uh.space(), f, 6);
  double worst = 0.0;
  for (int dof : uh.space().free_dofs()) worst = std::max(worst, std::abs(lhs(dof) - rhs(dof)));
  EXPECT_LE(worst, 2e-9);
}

TEST(Equilibration, AllBenchmarksAndOrders) {
  for (const BenchmarkCase& bench : {smooth_manufactured_case(), lshape_singular_case(), timoshenko_mixed_case()}) {
    for (int k : {2, 3, 4}) {
      const MeshPtr m = share(bench.mesh(3));
      const double alpha = default_penalty(k, bench.alpha0);
      const ScalarField uh = solve_on(m, k, alpha, bench.f, bench.singular);
      SCOPED_TRACE(bench.name + " k=" + std::to_string(k));
      try {
        const EquilibratedTensor eq = equilibrate_from_dg(uh, alpha, bench.f, bench.singular);
        EXPECT_TRUE(eq.check.passed()) << eq.check.residual;
      } catch (const std::exception& e) {
        ADD_FAILURE() << e.what();
      }
    }
  }
}

TEST(Equilibration, TraceVanishesOnSupportedAndFreeEdges) {
  const BenchmarkCase bench = timoshenko_mixed_case();
  const MeshPtr m = share(bench.mesh(4));
  const double alpha = default_penalty(2, bench.alpha0);
  const MomentField sigma = equilibrated_tensor(solve_on(m, 2, alpha, bench.f), alpha);
  for (int e = 0; e < m->num_edges(); ++e) {
    if (!m->edge(e).boundary() || m->boundary_kind(e) == BoundaryKind::Clamped) continue;
    for (double s : {0.0, 0.5, 1.0}) {
      EXPECT_NEAR(nn(sigma.value(m->edge(e).t[0], m->edge_point(e, s)), m->edge_normal(e)), 0.0, 1e-12);
    }
  }
}

TEST(Equilibration, WrongDeflectionIsRejected) {
  std::mt19937 rng(53);
  const MeshPtr m = share(make_square_mesh(3));
  const auto V = std::make_shared<const LagrangeSpace>(m, 2);
  const ScalarField junk = kplate::testing::random_scalar(V, rng);
  try {
    equilibrate_from_dg(junk, 9.0, [](const Vec2&) { return 1.0; });
    FAIL() << "expected EquilibrationError";
  } catch (const EquilibrationError& e) {
    EXPECT_GT(e.residual(), 1e-6);
  }
}

TEST(Equilibration, ComponentsArePolynomialsOfDegreeKMinusOne) {
  const BenchmarkCase bench = smooth_manufactured_case();
  const MeshPtr m = share(bench.mesh(3));
  for (int k : {2, 3}) {
    const double alpha = default_penalty(k);
    const MomentField sigma = equilibrated_tensor(solve_on(m, k, alpha, bench.f), alpha);
    for (int t = 0; t < m->num_triangles(); ++t) {
      // Least-squares fit by degree k-1 polynomials at many points is exact.
      const ScaledMonomials mono(k - 1, m->centroid(t), m->diameter(t));
      const auto pts = element_points(*m, t, 10);
      Eigen::MatrixXd P(pts.size(), mono.size());
      Eigen::MatrixXd Y(pts.size(), 3);
      Eigen::VectorXd row(mono.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        mono.values(pts[i].x, row);
        P.row(i) = row;
        const Mat2 s = sigma.value(t, pts[i].x);
        Y.row(i) << s(0, 0), s(0, 1), s(1, 1);
      }
      const Eigen::MatrixXd C = P.colPivHouseholderQr().solve(Y);
      EXPECT_LE((P * C - Y).cwiseAbs().maxCoeff(), 1e-10 * (1 + Y.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Equilibration, ConstructionIsLocal) {
  const BenchmarkCase bench = smooth_manufactured_case();
  const MeshPtr m = share(bench.mesh(4));
  const int k = 3;
  const double alpha = default_penalty(k);
  const ScalarField uh = solve_on(m, k, alpha, bench.f, bench.singular);
  const int target = 13;
  ScalarField perturbed = uh;
  perturbed.coeffs()(uh.space().interior_dof(target, 0)) += 0.25;
  const MomentField a = equilibrated_tensor(uh, alpha), b = equilibrated_tensor(perturbed, alpha);

  std::set<int> patch = {target};
  for (int e : m->triangle_edges(target)) {
    for (int t : m->edge(e).t) {
      if (t >= 0) patch.insert(t);
    }
  }
  int changed = 0;
  for (int t = 0; t < m->num_triangles(); ++t) {
    const double d = (a.local(t) - b.local(t)).cwiseAbs().maxCoeff();
    if (patch.count(t)) {
      changed += d > 0.0;
    } else {
      EXPECT_EQ(d, 0.0) << "element " << t << " outside the patch changed";
    }
  }
  EXPECT_GT(changed, 0);
}

TEST(Equilibration, InvariantUnderEdgeReversal) {
  const BenchmarkCase bench = smooth_manufactured_case();
  const Mesh base = make_square_mesh(3);
  int e = 0;
  while (base.edge(e).boundary()) ++e;
  const MeshPtr a = share(base), b = share(base.with_reversed_edge(e));
  const int k = 2;
  const double alpha = default_penalty(k);
  const MomentField sa = equilibrated_tensor(solve_on(a, k, alpha, bench.f), alpha);
  const MomentField sb = equilibrated_tensor(solve_on(b, k, alpha, bench.f), alpha);
  for (int t = 0; t < a->num_triangles(); ++t) {
    for (const auto& p : element_points(*a, t, 2)) {
      EXPECT_LE((sa.value(t, p.x) - sb.value(t, p.x)).norm(), 1e-10 * (1 + sa.value(t, p.x).norm()));
    }
  }
}
