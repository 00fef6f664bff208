#pragma once

#include <array>
#include <cmath>

namespace kplate {

/// Truncated bivariate Taylor polynomial of total order N around a base point:
/// sum_{i+j<=N} c(i,j) X^i Y^j. Used to differentiate closed-form solutions.
template <int N>
class Jet {
 public:
  static constexpr int kSize = (N + 1) * (N + 2) / 2;

  Jet() { c_.fill(0.0); }
  explicit Jet(double value) : Jet() { c_[0] = value; }

  /// The coordinate functions x = x0 + X and y = y0 + Y.
  static Jet variable(int axis, double base) {
    Jet j(base);
    if (N >= 1) j.at(axis == 0 ? 1 : 0, axis == 0 ? 0 : 1) = 1.0;
    return j;
  }

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }
  double& at(int i, int j) { return c_[index(i, j)]; }
  double at(int i, int j) const { return c_[index(i, j)]; }
  double value() const { return c_[0]; }

  /// Partial derivative d^{i+j} / dx^i dy^j at the base point.
  double derivative(int i, int j) const { return at(i, j) * factorial(i) * factorial(j); }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i < kSize; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator-(Jet a, double s) {
    a.c_[0] -= s;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int da = 0; da <= N; ++da) {
      for (int ja = 0; ja <= da; ++ja) {
        const double ca = a.at(da - ja, ja);
        if (ca == 0.0) continue;
        for (int db = 0; db + da <= N; ++db) {
          for (int jb = 0; jb <= db; ++jb) r.at(da - ja + db - jb, ja + jb) += ca * b.at(db - jb, jb);
        }
      }
    }
    return r;
  }

  /// g(jet) given the Taylor coefficients g_n = g^{(n)}(value()) / n!.
  Jet compose(const std::array<double, N + 1>& g) const {
    Jet delta = *this;
    delta.c_[0] = 0.0;
    Jet r(g[0]);
    Jet p(1.0);
    for (int n = 1; n <= N; ++n) {
      p = p * delta;
      r += g[n] * p;
    }
    return r;
  }

  static constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

 private:
  std::array<double, kSize> c_;
};

template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
  const double a0 = a.value();
  std::array<double, N + 1> g{};
  double binom = 1.0;
  for (int n = 0; n <= N; ++n) {
    g[n] = binom * std::pow(a0, p - n);
    binom *= (p - n) / (n + 1);
  }
  return a.compose(g);
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  std::array<double, N + 1> g{};
  const double d[4] = {s, c, -s, -c};
  for (int n = 0; n <= N; ++n) g[n] = d[n % 4] / Jet<N>::factorial(n);
  return a.compose(g);
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  std::array<double, N + 1> g{};
  const double d[4] = {c, -s, -c, s};
  for (int n = 0; n <= N; ++n) g[n] = d[n % 4] / Jet<N>::factorial(n);
  return a.compose(g);
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  const double a0 = a.value();
  std::array<double, N + 1> g{};
  double v = 1.0 / a0;
  for (int n = 0; n <= N; ++n) {
    g[n] = v;
    v *= -1.0 / a0;
  }
  return a.compose(g);
}

/// atan of a jet whose value is zero.
template <int N>
Jet<N> atan_at_zero(const Jet<N>& w) {
  std::array<double, N + 1> g{};
  for (int n = 1; n <= N; n += 2) g[n] = ((n / 2) % 2 == 0 ? 1.0 : -1.0) / n;
  return w.compose(g);
}

}  // namespace kplate
