#pragma once

// Iterative refinement with residuals in double-double arithmetic. The iterate
// is carried as an unevaluated sum hi + lo so that the reported residual is
// that of the refined solution; fourth-order systems on fine meshes have
// condition numbers where a plain double residual cannot drop below ~1e-9.

#include <cmath>
#include <vector>

#include <Eigen/SparseCore>

namespace kplate::detail {

struct DoubleDouble {
  double hi = 0.0, lo = 0.0;
};

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline void accumulate(DoubleDouble& acc, double a, double b) {
  // acc += a * b, with the product formed exactly.
  const double p = a * b;
  const double pe = std::fma(a, b, -p);
  const DoubleDouble s = two_sum(acc.hi, p);
  const DoubleDouble t = two_sum(s.hi, s.lo + acc.lo + pe);
  acc = t;
}

/// r = b - A (hi + lo), rounded to double.
inline Eigen::VectorXd residual_dd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& hi,
                                   const Eigen::VectorXd& lo, const Eigen::VectorXd& b) {
  std::vector<DoubleDouble> r(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) r[i].hi = b(i);
  for (int j = 0; j < A.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) {
      accumulate(r[it.row()], -it.value(), hi(j));
      accumulate(r[it.row()], -it.value(), lo(j));
    }
  }
  Eigen::VectorXd out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) out(i) = r[i].hi + r[i].lo;
  return out;
}

/// Refines x (initially from `solve`) until ||b - Ax|| <= target ||b|| or no
/// further progress; returns the relative residual reached.
template <class Solve>
double refine(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, Solve&& solve, Eigen::VectorXd& x,
              double target = 1e-14, int max_steps = 10) {
  const double bn = b.norm();
  if (bn == 0) {
    x.setZero(b.size());
    return 0.0;
  }
  Eigen::VectorXd hi = x, lo = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd r = residual_dd(A, hi, lo, b);
  double rel = r.norm() / bn;
  for (int step = 0; step < max_steps && rel > target; ++step) {
    const Eigen::VectorXd d = solve(r);
    if (!d.allFinite()) break;
    Eigen::VectorXd nhi(x.size()), nlo(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const DoubleDouble s = two_sum(hi(i), d(i));
      const DoubleDouble t = two_sum(s.hi, s.lo + lo(i));
      nhi(i) = t.hi;
      nlo(i) = t.lo;
    }
    Eigen::VectorXd rn = residual_dd(A, nhi, nlo, b);
    const double reln = rn.norm() / bn;
    if (!(reln < rel)) break;
    hi.swap(nhi);
    lo.swap(nlo);
    r.swap(rn);
    rel = reln;
  }
  x = hi;
  return rel;
}

}  // namespace kplate::detail
