#include "kplate/polynomial.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace kplate {

void BasisValues::resize(int n) {
  for (auto* v_ : {&v, &dx, &dy, &dxx, &dxy, &dyy}) v_->setZero(n);
}

ScaledMonomials::ScaledMonomials(int degree, const Vec2& center, double scale)
    : degree_(degree), center_(center), scale_(scale) {
  if (degree < 0) throw std::invalid_argument("ScaledMonomials: negative degree");
}

namespace {

constexpr int kMaxPower = 16;

void powers(double x, int p, std::array<double, kMaxPower + 1>& out) {
  out[0] = 1.0;
  for (int i = 1; i <= p; ++i) out[i] = out[i - 1] * x;
}

double monomial_integral_reference(int a, int b) {
  // int_ref x^a y^b = a! b! / (a + b + 2)!
  return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
}

}  // namespace

void ScaledMonomials::values(const Vec2& x, Eigen::Ref<Eigen::VectorXd> out) const {
  const Vec2 xi = (x - center_) / scale_;
  std::array<double, kMaxPower + 1> px{}, py{};
  powers(xi.x(), degree_, px);
  powers(xi.y(), degree_, py);
  int idx = 0;
  for (int d = 0; d <= degree_; ++d) {
    for (int i = d; i >= 0; --i) out(idx++) = px[i] * py[d - i];
  }
}

void ScaledMonomials::evaluate(const Vec2& x, BasisValues& out) const {
  const int n = size();
  if (out.v.size() != n) out.resize(n);
  const Vec2 xi = (x - center_) / scale_;
  std::array<double, kMaxPower + 1> px{}, py{};
  powers(xi.x(), degree_, px);
  powers(xi.y(), degree_, py);
  const double h1 = 1.0 / scale_;
  const double h2 = h1 * h1;
  auto pw = [](const std::array<double, kMaxPower + 1>& p, int e) { return e < 0 ? 0.0 : p[e]; };
  int idx = 0;
  for (int d = 0; d <= degree_; ++d) {
    for (int i = d; i >= 0; --i) {
      const int j = d - i;
      out.v(idx) = px[i] * py[j];
      out.dx(idx) = i * pw(px, i - 1) * py[j] * h1;
      out.dy(idx) = j * px[i] * pw(py, j - 1) * h1;
      out.dxx(idx) = i * (i - 1) * pw(px, i - 2) * py[j] * h2;
      out.dxy(idx) = i * j * pw(px, i - 1) * pw(py, j - 1) * h2;
      out.dyy(idx) = j * (j - 1) * px[i] * pw(py, j - 2) * h2;
      ++idx;
    }
  }
}

const Eigen::MatrixXd& reference_orthonormal(int p) {
  constexpr int kMax = 10;
  if (p < 0 || p > kMax) throw std::out_of_range("reference_orthonormal: unsupported degree");
  static std::array<Eigen::MatrixXd, kMax + 1> cache;
  static std::once_flag flag;
  std::call_once(flag, [] {
    for (int deg = 0; deg <= kMax; ++deg) {
      const int n = num_monomials(deg);
      std::vector<std::pair<int, int>> exps;
      for (int d = 0; d <= deg; ++d) {
        for (int i = d; i >= 0; --i) exps.emplace_back(i, d - i);
      }
      Eigen::MatrixXd G(n, n);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b)
          G(a, b) = 2.0 * monomial_integral_reference(exps[a].first + exps[b].first,
                                                      exps[a].second + exps[b].second);
      }
      // G = L L^T; rows of L^{-1} are orthonormal combinations of monomials.
      Eigen::LLT<Eigen::MatrixXd> llt(G);
      Eigen::MatrixXd Linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
      cache[deg] = Linv;
    }
  });
  return cache[p];
}

void reference_orthonormal_values(int p, const Vec2& ref, Eigen::Ref<Eigen::VectorXd> out) {
  if (p < 0) return;
  const Eigen::MatrixXd& C = reference_orthonormal(p);
  Eigen::VectorXd m(num_monomials(p));
  ScaledMonomials(p, Vec2::Zero(), 1.0).values(ref, m);
  out = C * m;
}

void legendre_values(int p, double s, Eigen::Ref<Eigen::VectorXd> out) {
  if (p < 0) return;
  const double x = 2.0 * s - 1.0;
  double pm1 = 1.0, pc = x;
  out(0) = 1.0;
  if (p >= 1) out(1) = std::sqrt(3.0) * x;
  for (int n = 1; n < p; ++n) {
    const double pn = ((2.0 * n + 1.0) * x * pc - n * pm1) / (n + 1.0);
    pm1 = pc;
    pc = pn;
    out(n + 1) = std::sqrt(2.0 * (n + 1) + 1.0) * pn;
  }
}

AffineMap element_map(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangle(t);
  const Vec2& a = mesh.vertex(tri[0]);
  AffineMap m;
  m.origin = a;
  m.jacobian << mesh.vertex(tri[1]) - a, mesh.vertex(tri[2]) - a;
  return m;
}

}  // namespace kplate
