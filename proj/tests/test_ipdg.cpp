#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "kplate/benchmarks.hpp"
#include "kplate/estimator.hpp"
#include "kplate/ipdg.hpp"
#include "kplate/projection.hpp"
#include "kplate/quadrature.hpp"
#include "support.hpp"

using namespace kplate;
using kplate::testing::share;

namespace {

BoundarySpec mixed() {
  BoundarySpec spec;
  spec.rules = {{0, 0.0, BoundaryKind::SimplySupported},
                {0, 1.0, BoundaryKind::SimplySupported},
                {1, 1.0, BoundaryKind::Free}};
  return spec;
}

BoundarySpec all_free() {
  BoundarySpec spec;
  spec.default_kind = BoundaryKind::Free;
  return spec;
}

Eigen::VectorXd free_part(const ScalarField& u) {
  const LagrangeSpace& V = u.space();
  Eigen::VectorXd x(V.num_free());
  for (int i = 0; i < V.num_free(); ++i) x(i) = u.coeffs()(V.free_dofs()[i]);
  return x;
}

IPDGProblem problem(MeshPtr mesh, int k, ScalarFunction f) {
  IPDGProblem p;
  p.mesh = std::move(mesh);
  p.k = k;
  p.alpha = default_penalty(k);
  p.f = std::move(f);
  return p;
}

// Squared DG norm by direct summation over elements and penalized edges.
DGNormParts direct_dg_norm(const ScalarField& v, double alpha) {
  const Mesh& m = v.space().mesh();
  DGNormParts out;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (const auto& p : element_points(m, t, 2 * v.space().order())) out.hessian += p.w * v.hessian(t, p.x).squaredNorm();
  }
  const QuadRule& q = edge_rule(2 * v.space().order());
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& E = m.edge(e);
    if (E.boundary() && m.boundary_kind(e) != BoundaryKind::Clamped) continue;
    const Vec2 n = m.edge_normal(e);
    const double h = m.edge_length(e);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const Vec2 x = m.edge_point(e, q.points[i].x());
      double jump = v.gradient(E.t[0], x).dot(n);
      if (!E.boundary()) jump -= v.gradient(E.t[1], x).dot(n);
      out.jump += alpha / h * q.weights[i] * h * jump * jump;
    }
  }
  return out;
}

}  // namespace

TEST(IPDG, PenalizedEdgesAreInteriorAndClamped) {
  const Mesh m = make_square_mesh(2, mixed());
  for (int e = 0; e < m.num_edges(); ++e) {
    const bool want = !m.edge(e).boundary() || m.boundary_kind(e) == BoundaryKind::Clamped;
    EXPECT_EQ(penalized_edge(m, e), want);
  }
}

TEST(IPDG, MatrixIsSymmetric) {
  for (const BoundarySpec& spec : {BoundarySpec{}, mixed()}) {
    for (int k : {2, 3, 4}) {
      const LinearSystem s = assemble(problem(share(make_square_mesh(3, spec)), k, [](const Vec2&) { return 1.0; }));
      SparseMatrix d = s.A - SparseMatrix(s.A.transpose());
      EXPECT_LE(d.coeffs().cwiseAbs().maxCoeff(), 1e-12 * s.A.norm());
    }
  }
}

TEST(IPDG, CoarseMatrixIsPositiveDefinite) {
  const LinearSystem s = assemble(problem(share(make_square_mesh(2)), 2, [](const Vec2&) { return 1.0; }));
  ASSERT_DOUBLE_EQ(default_penalty(2), 9.0);
  const Eigen::MatrixXd A(s.A);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(IPDG, CoercivityRelativeToDGNorm) {
  // Smallest generalized eigenvalue of (A, DG Gram). Recorded values: 0.662
  // (k=2) and 0.463 (k=3) on the clamped square, n=2.
  for (int k : {2, 3}) {
    const MeshPtr m = share(make_square_mesh(2));
    const LagrangeSpace V(m, k);
    const double alpha = default_penalty(k);
    const Eigen::MatrixXd A(assemble_matrix(V, alpha));
    const Eigen::MatrixXd G(dg_gram(V, alpha));
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, G);
    EXPECT_GE(es.eigenvalues().minCoeff(), 0.1) << "k=" << k;
  }
}

TEST(IPDG, FormMatchesAssembledMatrix) {
  std::mt19937 rng(2);
  const MeshPtr m = share(refine(make_square_mesh(2, mixed()), std::vector<int>{1, 6}).mesh);
  for (int k : {2, 3}) {
    const auto V = std::make_shared<const LagrangeSpace>(m, k);
    const double alpha = default_penalty(k, 2.0);
    const SparseMatrix A = assemble_matrix(*V, alpha);
    const ScalarField u = kplate::testing::random_scalar(V, rng), v = kplate::testing::random_scalar(V, rng);
    const double direct = ipdg_form(u, v, alpha);
    EXPECT_NEAR(direct, free_part(v).dot(A * free_part(u)), 1e-11 * (1 + std::abs(direct)));
    EXPECT_NEAR(direct, ipdg_form(v, u, alpha), 1e-11 * (1 + std::abs(direct)));
  }
}

TEST(IPDG, ConsistentForC1Functions) {
  // Global polynomials have no normal-derivative jumps; with free boundary
  // edges no edge term survives and A_h(v, v) is the broken Hessian energy.
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const MeshPtr m = share(make_square_mesh(3, all_free()));
  for (int k : {2, 3}) {
    const auto V = std::make_shared<const LagrangeSpace>(m, k);
    const double a = d(rng), b = d(rng), c = d(rng), e = d(rng);
    const ScalarField v = interpolate_Ih(V, [&](const Vec2& x) {
      return a * x.x() * x.x() + b * x.x() * x.y() + c * x.y() * x.y() + (k == 3 ? e * x.x() * x.y() * x.y() : 0.0);
    });
    const double energy = dg_norm(v, 9.0).hessian;
    EXPECT_NEAR(ipdg_form(v, v, 9.0), energy, 1e-10 * energy);
    EXPECT_NEAR(dg_norm(v, 9.0).jump, 0.0, 1e-20);
  }
}

TEST(IPDG, ZeroLoadGivesZeroSolution) {
  const ScalarField u = solve(problem(share(make_lshape_mesh(2)), 2, [](const Vec2&) { return 0.0; }));
  EXPECT_EQ(u.coeffs().cwiseAbs().maxCoeff(), 0.0);
}

TEST(IPDG, GalerkinOrthogonality) {
  std::mt19937 rng(12);
  const BenchmarkCase bench = smooth_manufactured_case();
  for (int k : {2, 3}) {
    const IPDGProblem p = problem(share(bench.mesh(4)), k, bench.f);
    const ScalarField uh = solve(p);
    const Eigen::VectorXd b = load_vector(uh.space(), p.f, 2 * k + 6);
    // Relative to the load pairing: the double coefficients of u_h alone
    // carry an absolute error of ~1e-11 in A_h(u_h, v) for |(f, v)| ~ 1e2.
    for (int trial = 0; trial < 10; ++trial) {
      const ScalarField v = kplate::testing::random_scalar(uh.space_ptr(), rng);
      const double fv = b.dot(v.coeffs());
      EXPECT_NEAR(ipdg_form(uh, v, p.alpha), fv, 1e-10 * (1 + std::abs(fv)));
    }
  }
}

TEST(IPDG, LinearInLoad) {
  const BenchmarkCase bench = smooth_manufactured_case();
  const MeshPtr m = share(bench.mesh(4));
  const ScalarField u1 = solve(problem(m, 2, bench.f));
  const ScalarField u3 = solve(problem(m, 2, [&](const Vec2& x) { return -3.5 * bench.f(x); }));
  EXPECT_LE((u3.coeffs() + 3.5 * u1.coeffs()).norm(), 1e-12 * u3.coeffs().norm());
}

TEST(IPDG, AdaptedFormEqualsStandardFormWhenClamped) {
  for (int k : {2, 3}) {
    const IPDGProblem p = problem(share(make_lshape_mesh(2)), k, [](const Vec2& x) { return 1.0 + x.x(); });
    const LinearSystem a = assemble(p, true), s = assemble(p, false);
    ASSERT_EQ(a.A.nonZeros(), s.A.nonZeros());
    EXPECT_TRUE(Eigen::MatrixXd(a.A) == Eigen::MatrixXd(s.A));
    EXPECT_TRUE(a.b == s.b);
  }
}

TEST(IPDG, AdaptedFormDropsFreeAndSupportedEdges) {
  const IPDGProblem p = problem(share(make_square_mesh(2, mixed())), 2, [](const Vec2&) { return 1.0; });
  const LinearSystem a = assemble(p, true), s = assemble(p, false);
  EXPECT_GT((Eigen::MatrixXd(a.A) - Eigen::MatrixXd(s.A)).norm(), 1e-3);
}

TEST(IPDG, RejectsInvalidParameters) {
  IPDGProblem p = problem(share(make_square_mesh(1)), 2, [](const Vec2&) { return 1.0; });
  p.alpha = 0.0;
  EXPECT_THROW(assemble(p), std::invalid_argument);
  p.alpha = 9.0;
  p.k = 1;
  EXPECT_THROW(assemble(p), std::invalid_argument);
}

TEST(DGNorm, ZeroField) {
  const auto V = std::make_shared<const LagrangeSpace>(share(make_square_mesh(2)), 2);
  const DGNormParts d = dg_norm(ScalarField::zero(V), 9.0);
  EXPECT_EQ(d.hessian, 0.0);
  EXPECT_EQ(d.jump, 0.0);
}

TEST(DGNorm, QuadraticOnTwoElements) {
  const MeshPtr m = share(make_square_mesh(1, all_free()));
  const auto V = std::make_shared<const LagrangeSpace>(m, 2);
  const ScalarField v = interpolate_Ih(V, [](const Vec2& x) { return x.x() * x.x(); });
  for (double alpha : {1.0, 9.0, 100.0}) {
    const DGNormParts d = dg_norm(v, alpha);
    EXPECT_NEAR(d.jump, 0.0, 1e-24);
    EXPECT_NEAR(d.hessian, 4.0, 1e-13);
    EXPECT_NEAR(d.total(), 2.0, 1e-13);
  }
}

TEST(DGNorm, MatchesDirectSummationAndGram) {
  std::mt19937 rng(15);
  for (const BoundarySpec& spec : {BoundarySpec{}, mixed()}) {
    const MeshPtr m = share(refine(make_square_mesh(2, spec), std::vector<int>{0, 5}).mesh);
    for (int k : {2, 3}) {
      const auto V = std::make_shared<const LagrangeSpace>(m, k);
      const ScalarField v = kplate::testing::random_scalar(V, rng);
      const double alpha = default_penalty(k);
      const DGNormParts d = dg_norm(v, alpha), ref = direct_dg_norm(v, alpha);
      EXPECT_NEAR(d.hessian, ref.hessian, 1e-11 * ref.hessian);
      EXPECT_NEAR(d.jump, ref.jump, 1e-11 * ref.jump);
      EXPECT_NEAR(d.total(), std::sqrt(d.hessian + d.jump), 0.0);
      const Eigen::VectorXd x = free_part(v);
      EXPECT_NEAR(x.dot(dg_gram(*V, alpha) * x), d.hessian + d.jump, 1e-11 * (d.hessian + d.jump));
    }
  }
}

TEST(IPDG, SmoothCaseConvergesAtRateOne) {
  const BenchmarkCase bench = smooth_manufactured_case();
  std::vector<double> err;
  for (int n : {4, 8, 16, 32}) {
    IPDGProblem p = problem(share(bench.mesh(n)), 2, bench.f);
    const ScalarField uh = solve(p);
    err.push_back(exact_dg_error(uh, *bench.exact, p.alpha));
  }
  for (std::size_t i = 2; i < err.size(); ++i) EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 1.0, 0.2);
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], err[i - 1]);
}
