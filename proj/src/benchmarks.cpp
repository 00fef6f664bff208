#include "kplate/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

#include "kplate/jet.hpp"

namespace kplate {

namespace {

constexpr double kPi = std::numbers::pi;

// The singular factor r^{1+z} g(phi) of the L-shape solution as a jet around
// (x0, y0) (which must not be the origin).
template <int N>
Jet<N> lshape_singular_jet(double x0, double y0) {
  const double z = kLShapeExponent, w = kLShapeAngle;
  const Jet<N> x = Jet<N>::variable(0, x0), y = Jet<N>::variable(1, y0);
  const Jet<N> X = x - x0, Y = y - y0;
  double phi0 = std::atan2(y0, x0);
  if (phi0 < 0.0) phi0 += 2.0 * kPi;
  const double r2 = x0 * x0 + y0 * y0;
  // phi = phi0 + atan(cross / dot) relative to the base direction.
  const Jet<N> cross = x0 * Y - y0 * X;
  const Jet<N> dot = (x0 * X + y0 * Y) + r2;
  const Jet<N> phi = atan_at_zero(cross * reciprocal(dot)) + phi0;

  const double A = std::sin((z - 1) * w) / (z - 1) - std::sin((z + 1) * w) / (z + 1);
  const double B = std::cos((z - 1) * w) - std::cos((z + 1) * w);
  const Jet<N> g = A * (cos((z - 1) * phi) - cos((z + 1) * phi)) -
                   B * (sin((z - 1) * phi) * (1.0 / (z - 1)) - sin((z + 1) * phi) * (1.0 / (z + 1)));
  return pow(X * X + Y * Y + 2.0 * (x0 * X + y0 * Y) + r2, 0.5 * (1.0 + z)) * g;
}

template <int N>
Jet<N> lshape_cutoff_jet(double x0, double y0) {
  const Jet<N> x = Jet<N>::variable(0, x0), y = Jet<N>::variable(1, y0);
  const Jet<N> px = x * x - 1.0, py = y * y - 1.0;
  return px * px * py * py;
}

template <int N>
Jet<N> lshape_jet(double x0, double y0) {
  return lshape_cutoff_jet<N>(x0, y0) * lshape_singular_jet<N>(x0, y0);
}

// Delta^2 (p q) with Delta^2 q = 0 dropped analytically. Differentiating the
// product directly loses all accuracy near the corner, where the individual
// fourth derivatives of q are O(r^{z-3}) but cancel.
double lshape_load(double x0, double y0) {
  const Jet<4> p = lshape_cutoff_jet<4>(x0, y0);
  const Jet<3> q = lshape_singular_jet<3>(x0, y0);
  auto d = [](const auto& j, int a, int b) { return j.derivative(a, b); };
  const double lp = d(p, 2, 0) + d(p, 0, 2), lq = d(q, 2, 0) + d(q, 0, 2);
  const double llp = d(p, 4, 0) + 2.0 * d(p, 2, 2) + d(p, 0, 4);
  const Vec2 glp(d(p, 3, 0) + d(p, 1, 2), d(p, 2, 1) + d(p, 0, 3));
  const Vec2 glq(d(q, 3, 0) + d(q, 1, 2), d(q, 2, 1) + d(q, 0, 3));
  const Vec2 gp(d(p, 1, 0), d(p, 0, 1)), gq(d(q, 1, 0), d(q, 0, 1));
  const double hh = d(p, 2, 0) * d(q, 2, 0) + 2.0 * d(p, 1, 1) * d(q, 1, 1) + d(p, 0, 2) * d(q, 0, 2);
  return llp * q.value() + 4.0 * glp.dot(gq) + 2.0 * lp * lq + 4.0 * hh + 4.0 * gp.dot(glq);
}

bool at_origin(const Vec2& p) { return p.x() == 0.0 && p.y() == 0.0; }

}  // namespace

BenchmarkCase lshape_singular_case() {
  BenchmarkCase c;
  c.name = "lshape";
  c.make_mesh = [](int n, const BoundarySpec& s) { return make_lshape_mesh(n, s); };
  c.singular = Vec2::Zero();
  c.alpha0 = 1.0;
  c.f = [](const Vec2& p) {
    if (at_origin(p)) return 0.0;
    return lshape_load(p.x(), p.y());
  };
  ExactSolution ex;
  ex.u = [](const Vec2& p) { return at_origin(p) ? 0.0 : lshape_jet<0>(p.x(), p.y()).value(); };
  ex.gradient = [](const Vec2& p) -> Vec2 {
    if (at_origin(p)) return Vec2::Zero();
    const Jet<1> u = lshape_jet<1>(p.x(), p.y());
    return {u.derivative(1, 0), u.derivative(0, 1)};
  };
  ex.hessian = [](const Vec2& p) -> Mat2 {
    if (at_origin(p)) return Mat2::Zero();
    const Jet<2> u = lshape_jet<2>(p.x(), p.y());
    const double xy = u.derivative(1, 1);
    return (Mat2() << u.derivative(2, 0), xy, xy, u.derivative(0, 2)).finished();
  };
  c.exact = ex;
  return c;
}

BenchmarkCase smooth_manufactured_case() {
  BenchmarkCase c;
  c.name = "smooth";
  c.make_mesh = [](int n, const BoundarySpec& s) { return make_square_mesh(n, s); };
  c.alpha0 = 1.0;
  // S(x) = sin^2(pi x) and its derivatives.
  struct S {
    double v, d1, d2, d4;
    explicit S(double x)
        : v(std::pow(std::sin(kPi * x), 2)),
          d1(kPi * std::sin(2 * kPi * x)),
          d2(2 * kPi * kPi * std::cos(2 * kPi * x)),
          d4(-8 * std::pow(kPi, 4) * std::cos(2 * kPi * x)) {}
  };
  c.f = [](const Vec2& p) {
    const S a(p.x()), b(p.y());
    return a.d4 * b.v + 2.0 * a.d2 * b.d2 + a.v * b.d4;
  };
  ExactSolution ex;
  ex.u = [](const Vec2& p) { return S(p.x()).v * S(p.y()).v; };
  ex.gradient = [](const Vec2& p) -> Vec2 {
    const S a(p.x()), b(p.y());
    return {a.d1 * b.v, a.v * b.d1};
  };
  ex.hessian = [](const Vec2& p) -> Mat2 {
    const S a(p.x()), b(p.y());
    const double xy = a.d1 * b.d1;
    return (Mat2() << a.d2 * b.v, xy, xy, a.v * b.d2).finished();
  };
  c.exact = ex;
  return c;
}

ExactSolution timoshenko_series(int max_m) {
  // Mode m: sin(a x) Y(y), a = m pi, with Y'''' - 2 a^2 Y'' + a^4 Y = 4/(m pi),
  // Y(0) = Y'(0) = 0, Y''(1) = 0, Y'''(1) - 2 a^2 Y'(1) = 0. Y = p + sum c_i b_i with
  // b = e^{-ay}, y e^{-ay}, e^{-a(1-y)}, (1-y) e^{-a(1-y)}.
  struct Mode {
    double a, p;
    Eigen::Vector4d c;
  };
  auto modes = std::make_shared<std::vector<Mode>>();
  for (int m = 1; m <= max_m; m += 2) {
    const double a = m * kPi;
    const double p = 4.0 / (m * kPi) / std::pow(a, 4);
    // Derivatives of the basis at y = 0 and y = 1, orders 0..3.
    auto basis = [&](double y, int d) -> Eigen::Vector4d {
      const double e0 = std::exp(-a * y), s = 1.0 - y, e1 = std::exp(-a * s);
      const double sg = (d % 2 == 0) ? 1.0 : -1.0;
      const double ad = std::pow(a, d);
      Eigen::Vector4d b;
      b(0) = sg * ad * e0;
      b(2) = ad * e1;
      switch (d) {
        case 0: b(1) = y * e0; b(3) = s * e1; break;
        case 1: b(1) = (1 - a * y) * e0; b(3) = -(1 - a * s) * e1; break;
        case 2: b(1) = (-2 * a + a * a * y) * e0; b(3) = (-2 * a + a * a * s) * e1; break;
        default: b(1) = (3 * a * a - a * a * a * y) * e0; b(3) = -(3 * a * a - a * a * a * s) * e1; break;
      }
      return b;
    };
    Eigen::Matrix4d K;
    K.row(0) = basis(0.0, 0).transpose();
    K.row(1) = basis(0.0, 1).transpose();
    K.row(2) = basis(1.0, 2).transpose();
    K.row(3) = (basis(1.0, 3) - 2 * a * a * basis(1.0, 1)).transpose();
    const Eigen::Vector4d rhs(-p, 0.0, 0.0, 0.0);
    modes->push_back({a, p, K.fullPivLu().solve(rhs)});
  }

  // All six quantities at once: u, u_x, u_y, u_xx, u_xy, u_yy. Exponentials and
  // trigonometric factors advance by recurrence from one odd m to the next.
  auto eval = [modes](const Vec2& p, double out[6]) {
    for (int i = 0; i < 6; ++i) out[i] = 0.0;
    const double y = p.y(), s = 1.0 - y;
    const double q0 = std::exp(-2.0 * kPi * y), q1 = std::exp(-2.0 * kPi * s);
    const double c2 = std::cos(2.0 * kPi * p.x()), s2 = std::sin(2.0 * kPi * p.x());
    double e0 = std::exp(-kPi * y), e1 = std::exp(-kPi * s);
    double sn = std::sin(kPi * p.x()), cs = std::cos(kPi * p.x());
    for (const Mode& md : *modes) {
      const double a = md.a;
      const Eigen::Vector4d& c = md.c;
      const double Y0 = md.p + c(0) * e0 + c(1) * y * e0 + c(2) * e1 + c(3) * s * e1;
      const double Y1 = -a * c(0) * e0 + c(1) * (1 - a * y) * e0 + a * c(2) * e1 - c(3) * (1 - a * s) * e1;
      const double Y2 = a * a * c(0) * e0 + c(1) * (-2 * a + a * a * y) * e0 + a * a * c(2) * e1 +
                        c(3) * (-2 * a + a * a * s) * e1;
      out[0] += sn * Y0;
      out[1] += a * cs * Y0;
      out[2] += sn * Y1;
      out[3] -= a * a * sn * Y0;
      out[4] += a * cs * Y1;
      out[5] += sn * Y2;
      e0 *= q0;
      e1 *= q1;
      const double sn2 = sn * c2 + cs * s2;
      cs = cs * c2 - sn * s2;
      sn = sn2;
    }
  };
  ExactSolution ex;
  ex.u = [eval](const Vec2& p) {
    double o[6];
    eval(p, o);
    return o[0];
  };
  ex.gradient = [eval](const Vec2& p) -> Vec2 {
    double o[6];
    eval(p, o);
    return {o[1], o[2]};
  };
  ex.hessian = [eval](const Vec2& p) -> Mat2 {
    double o[6];
    eval(p, o);
    return (Mat2() << o[3], o[4], o[4], o[5]).finished();
  };
  return ex;
}

BenchmarkCase timoshenko_mixed_case() {
  BenchmarkCase c;
  c.name = "timoshenko";
  c.make_mesh = [](int n, const BoundarySpec& s) { return make_square_mesh(n, s); };
  c.spec.default_kind = BoundaryKind::Clamped;
  c.spec.rules = {{0, 0.0, BoundaryKind::SimplySupported},
                  {0, 1.0, BoundaryKind::SimplySupported},
                  {1, 0.0, BoundaryKind::Clamped},
                  {1, 1.0, BoundaryKind::Free}};
  c.alpha0 = 2.0;
  c.f = [](const Vec2&) { return 1.0; };
  c.exact = timoshenko_series();
  return c;
}

BenchmarkCase benchmark_by_name(const std::string& name) {
  if (name == "lshape") return lshape_singular_case();
  if (name == "smooth") return smooth_manufactured_case();
  if (name == "timoshenko") return timoshenko_mixed_case();
  throw std::invalid_argument("unknown case '" + name + "'");
}

}  // namespace kplate
