#include "kplate/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kplate/ipdg.hpp"
#include "kplate/projection.hpp"
#include "kplate/quadrature.hpp"

namespace kplate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double l2sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double ErrorReport::basic_bound() const {
  return std::hypot(eta_nonconf, eta_jump) + eta_eq + eta_osc;
}

double ErrorReport::improved_bound() const { return std::hypot(eta_mean, eta_jump) + 0.5 * eta_eq + eta_osc; }

double ErrorReport::eff_eq() const { return has_exact ? basic_bound() / exact_err : kNaN; }
double ErrorReport::eff() const { return has_exact ? improved_bound() / exact_err : kNaN; }

double guaranteed_bound_basic(const ErrorReport& report) { return report.basic_bound(); }
double guaranteed_bound_improved(const ErrorReport& report) { return report.improved_bound(); }

std::vector<double> oscillation_terms(const ScalarFunction& f, int k, MeshPtr mesh,
                                      const std::optional<Vec2>& singular) {
  const Mesh& m = *mesh;
  const PiecewisePolynomial fbar = l2_project_piecewise(f, k - 3, mesh, singular);
  std::vector<double> out(m.num_triangles(), 0.0);
  const int deg = std::min(kMaxQuadratureDegree, 2 * k + 8);
  for (int t = 0; t < m.num_triangles(); ++t) {
    double s = 0.0;
    for (const auto& qp : element_points(m, t, deg, singular)) {
      const double d = f(qp.x) - fbar.value(t, qp.x);
      s += qp.w * d * d;
    }
    out[t] = std::pow(m.diameter(t), 4) * s;
  }
  return out;
}

double exact_dg_error(const ScalarField& uh, const ExactSolution& exact, double alpha,
                      const std::optional<Vec2>& singular) {
  const Mesh& m = uh.space().mesh();
  const int deg = std::min(kMaxQuadratureDegree, 2 * uh.space().order() + 10);
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (const auto& qp : element_points(m, t, deg, singular))
      s += qp.w * (exact.hessian(qp.x) - uh.hessian(t, qp.x)).squaredNorm();
  }
  return std::sqrt(s + dg_norm(uh, alpha).jump);
}

ErrorReport compute_report(const EstimatorInput& in) {
  if (!in.uh || !in.sigma) throw std::invalid_argument("compute_report: u_h and sigma are required");
  const ScalarField& uh = *in.uh;
  const Mesh& m = uh.space().mesh();
  if (&m != &in.sigma->space().mesh() || (in.uconf && &m != &in.uconf->space().mesh()))
    throw std::invalid_argument("compute_report: fields live on different meshes");
  const int k = uh.space().order();
  const int nt = m.num_triangles();

  ErrorReport r;
  r.dofs = uh.space().num_free();
  r.elements = nt;
  r.has_conforming = in.uconf != nullptr;
  r.eta_eq_T.assign(nt, 0.0);
  r.eta_mean_T.assign(nt, 0.0);
  r.eta_nonconf_T.assign(nt, 0.0);

  const int deg = 2 * k + 2;
  if (in.uconf) {
    const C1Space& c1 = in.uconf->space();
    for (int t = 0; t < nt; ++t) {
      double eq = 0.0, nc = 0.0, mean = 0.0;
      for (int sub = 0; sub < 3; ++sub) {
        const auto p = c1.sub_triangle(t, sub);
        for (const auto& qp : triangle_points(p[0], p[1], p[2], deg)) {
          const Mat2 Hh = uh.hessian(t, qp.x);
          const Mat2 Hc = in.uconf->hessian(t, sub, qp.x);
          const Mat2 S = in.sigma->value(t, qp.x);
          eq += qp.w * (Hc - S).squaredNorm();
          nc += qp.w * (Hh - Hc).squaredNorm();
          mean += qp.w * (Hh - 0.5 * (Hc + S)).squaredNorm();
        }
      }
      r.eta_eq_T[t] = std::sqrt(eq);
      r.eta_nonconf_T[t] = std::sqrt(nc);
      r.eta_mean_T[t] = std::sqrt(mean);
    }
    r.eta_eq = l2sum(r.eta_eq_T);
    r.eta_nonconf = l2sum(r.eta_nonconf_T);
    r.eta_mean = l2sum(r.eta_mean_T);
  } else {
    r.eta_eq = r.eta_nonconf = r.eta_mean = kNaN;
  }

  r.eta_jump = std::sqrt(dg_norm(uh, in.alpha).jump);

  const std::vector<double> osc =
      in.f ? oscillation_terms(in.f, k, uh.space().mesh_ptr(), in.singular) : std::vector<double>(nt, 0.0);
  r.eta_osc_T.resize(nt);
  double os = 0.0;
  for (int t = 0; t < nt; ++t) {
    r.eta_osc_T[t] = kOscillationConstant * std::sqrt(osc[t]);
    os += osc[t];
  }
  r.eta_osc = kOscillationConstant * std::sqrt(os);

  if (in.exact) {
    r.has_exact = true;
    r.exact_err = exact_dg_error(uh, *in.exact, in.alpha, in.singular);
  } else {
    r.exact_err = kNaN;
  }
  return r;
}

}  // namespace kplate
