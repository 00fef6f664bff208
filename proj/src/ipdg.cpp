#include "kplate/ipdg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "kplate/projection.hpp"
#include "kplate/quadrature.hpp"
#include "linear_solve.hpp"

namespace kplate {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

enum class Form { Bilinear, Gram };

// Normal-derivative jumps and normal-normal Hessian averages of the local
// bases of T1 (first columns) and T2 (remaining columns) at edge quadrature
// points.
struct EdgeTrace {
  std::vector<int> dofs;
  Eigen::MatrixXd jump;  // nq x ncols
  Eigen::MatrixXd avg;   // nq x ncols
  Eigen::VectorXd w;     // physical weights
};

void edge_trace(const LagrangeSpace& space, int e, EdgeTrace& out) {
  const Mesh& m = space.mesh();
  const Edge& edge = m.edge(e);
  const QuadRule& er = edge_rule(2 * space.order());
  const Vec2 n = m.edge_normal(e);
  const double h = m.edge_length(e);
  const int nq = static_cast<int>(er.size());
  const int nl = space.dofs_per_element();
  const int sides = edge.boundary() ? 1 : 2;
  out.dofs.clear();
  out.jump.setZero(nq, sides * nl);
  out.avg.setZero(nq, sides * nl);
  out.w.resize(nq);
  BasisValues bv;
  for (int s = 0; s < sides; ++s) {
    const int t = edge.t[s];
    const auto d = space.element_dofs(t);
    out.dofs.insert(out.dofs.end(), d.begin(), d.end());
    const double sign = s == 0 ? 1.0 : -1.0;
    const double avg = sides == 1 ? 1.0 : 0.5;
    for (int q = 0; q < nq; ++q) {
      const Vec2 x = m.edge_point(e, er.points[q].x());
      space.evaluate(t, x, bv);
      out.jump.block(q, s * nl, 1, nl) = sign * (n.x() * bv.dx + n.y() * bv.dy).transpose();
      const Eigen::VectorXd hnn = n.x() * n.x() * bv.dxx + 2.0 * n.x() * n.y() * bv.dxy + n.y() * n.y() * bv.dyy;
      out.avg.block(q, s * nl, 1, nl) = avg * hnn.transpose();
      out.w(q) = er.weights[q] * h;
    }
  }
}

template <class Map>
void scatter(Triplets& trip, std::span<const int> dofs, const Eigen::MatrixXd& K, Map map) {
  for (int i = 0; i < K.rows(); ++i) {
    const int gi = map(dofs[i]);
    if (gi < 0) continue;
    for (int j = 0; j < K.cols(); ++j) {
      const int gj = map(dofs[j]);
      if (gj >= 0 && K(i, j) != 0.0) trip.emplace_back(gi, gj, K(i, j));
    }
  }
}

template <class Map>
SparseMatrix assemble_impl(const LagrangeSpace& space, double alpha, bool adapted, Form form, int n, Map map) {
  const Mesh& m = space.mesh();
  Triplets trip;
  BasisValues bv;
  const int nl = space.dofs_per_element();
  for (int t = 0; t < m.num_triangles(); ++t) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nl, nl);
    for (const auto& qp : element_points(m, t, 2 * space.order())) {
      space.evaluate(t, qp.x, bv);
      K.noalias() += qp.w * (bv.dxx * bv.dxx.transpose() + 2.0 * bv.dxy * bv.dxy.transpose() +
                             bv.dyy * bv.dyy.transpose());
    }
    scatter(trip, space.element_dofs(t), K, map);
  }
  EdgeTrace tr;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (adapted ? !penalized_edge(m, e) : false) continue;
    edge_trace(space, e, tr);
    const double pen = alpha / m.edge_length(e);
    const Eigen::MatrixXd WJ = tr.w.asDiagonal() * tr.jump;
    Eigen::MatrixXd K = pen * tr.jump.transpose() * WJ;
    if (form == Form::Bilinear) {
      const Eigen::MatrixXd C = tr.avg.transpose() * WJ;
      K -= C + C.transpose();
    }
    scatter(trip, tr.dofs, K, map);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace

bool penalized_edge(const Mesh& mesh, int e) {
  return !mesh.edge(e).boundary() || mesh.boundary_kind(e) == BoundaryKind::Clamped;
}

double DGNormParts::total() const { return std::sqrt(hessian + jump); }

SparseMatrix assemble_matrix(const LagrangeSpace& space, double alpha, bool adapted) {
  if (!(alpha > 0.0)) throw std::invalid_argument("assemble: penalty parameter must be positive");
  return assemble_impl(space, alpha, adapted, Form::Bilinear, space.num_free(),
                       [&](int d) { return space.free_index(d); });
}

LinearSystem assemble(const IPDGProblem& problem, bool adapted) {
  if (problem.k < 2) throw std::invalid_argument("assemble: order must be at least 2");
  auto space = std::make_shared<const LagrangeSpace>(problem.mesh, problem.k);
  LinearSystem sys{space, assemble_matrix(*space, problem.alpha, adapted), Eigen::VectorXd()};
  const Eigen::VectorXd full = problem.f ? load_vector(*space, problem.f, 2 * problem.k + 6, problem.singular)
                                         : Eigen::VectorXd::Zero(space->num_dofs());
  sys.b.resize(space->num_free());
  for (int i = 0; i < space->num_free(); ++i) sys.b(i) = full(space->free_dofs()[i]);
  return sys;
}

ScalarField solve_system(const LinearSystem& sys) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.b.size());
  double res = 0.0;
  if (sys.b.norm() > 0.0) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(sys.A);
    res = std::numeric_limits<double>::infinity();
    if (ldlt.info() == Eigen::Success) {
      x = ldlt.solve(sys.b);
      res = detail::refine(sys.A, sys.b, [&](const Eigen::VectorXd& r) { return Eigen::VectorXd(ldlt.solve(r)); }, x);
    }
    if (!(res <= 1e-10)) {
      Eigen::SparseLU<SparseMatrix> lu;
      lu.compute(sys.A);
      if (lu.info() == Eigen::Success) {
        Eigen::VectorXd y = lu.solve(sys.b);
        const double r2 =
            detail::refine(sys.A, sys.b, [&](const Eigen::VectorXd& r) { return Eigen::VectorXd(lu.solve(r)); }, y);
        if (r2 < res) {
          x = y;
          res = r2;
        }
      }
    }
    if (!(res <= 1e-10)) throw SolverError("IPDG solve failed", res);
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sys.space->num_dofs());
  for (int i = 0; i < sys.space->num_free(); ++i) c(sys.space->free_dofs()[i]) = x(i);
  return ScalarField(sys.space, std::move(c));
}

ScalarField solve(const IPDGProblem& problem) { return solve_system(assemble(problem)); }

DGNormParts dg_norm(const ScalarField& v, double alpha) {
  const LagrangeSpace& space = v.space();
  const Mesh& m = space.mesh();
  DGNormParts out;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (const auto& qp : element_points(m, t, 2 * space.order())) {
      out.hessian += qp.w * v.hessian(t, qp.x).squaredNorm();
    }
  }
  const QuadRule& er = edge_rule(2 * space.order());
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!penalized_edge(m, e)) continue;
    const Edge& edge = m.edge(e);
    const Vec2 n = m.edge_normal(e);
    const double h = m.edge_length(e);
    double s = 0.0;
    for (std::size_t q = 0; q < er.size(); ++q) {
      const Vec2 x = m.edge_point(e, er.points[q].x());
      double j = v.gradient(edge.t[0], x).dot(n);
      if (!edge.boundary()) j -= v.gradient(edge.t[1], x).dot(n);
      s += er.weights[q] * h * j * j;
    }
    out.jump += alpha / h * s;
  }
  return out;
}

SparseMatrix dg_gram(const LagrangeSpace& space, double alpha) {
  return assemble_impl(space, alpha, true, Form::Gram, space.num_free(),
                       [&](int d) { return space.free_index(d); });
}

double ipdg_form(const ScalarField& u, const ScalarField& v, double alpha) {
  const LagrangeSpace& space = u.space();
  const SparseMatrix A =
      assemble_impl(space, alpha, true, Form::Bilinear, space.num_dofs(), [](int d) { return d; });
  return u.coeffs().dot(A * v.coeffs());
}

}  // namespace kplate
