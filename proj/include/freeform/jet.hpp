#pragma once

// Second-order forward-mode automatic differentiation.
//
// A Jet<N> carries a value together with its gradient and Hessian with
// respect to N independent variables. Composition follows the chain rule
//   (f o g)'  = f'(g) g'
//   (f o g)'' = f''(g) g' g'^T + f'(g) g''
// so derivative oracles of parametric maps are exact to rounding.

#include <Eigen/Dense>

#include <cmath>

namespace freeform {

template <int N>
struct Jet {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;

  double v = 0.0;
  Vec d = Vec::Zero();
  Mat dd = Mat::Zero();

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Jet(double value, const Vec& grad, const Mat& hess) : v(value), d(grad), dd(hess) {}

  /// Independent variable number i, evaluated at value.
  static Jet variable(double value, int i) {
    Jet j(value);
    j.d(i) = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    d += o.d;
    dd += o.dd;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    d -= o.d;
    dd -= o.dd;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    dd = v * o.dd + o.v * dd + d * o.d.transpose() + o.d * d.transpose();
    d = v * o.d + o.v * d;
    v *= o.v;
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    d *= s;
    dd *= s;
    return *this;
  }
};

/// Apply a scalar function given its value and first two derivatives at x.v.
template <int N>
Jet<N> chain(const Jet<N>& x, double f, double df, double ddf) {
  Jet<N> r;
  r.v = f;
  r.d = df * x.d;
  r.dd = ddf * (x.d * x.d.transpose()) + df * x.dd;
  return r;
}

template <int N>
Jet<N> operator-(const Jet<N>& a) {
  return Jet<N>(-a.v, -a.d, -a.dd);
}

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) {
  return a += b;
}
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) {
  return a -= b;
}
template <int N>
Jet<N> operator*(Jet<N> a, const Jet<N>& b) {
  return a *= b;
}
template <int N>
Jet<N> operator+(Jet<N> a, double b) {
  a.v += b;
  return a;
}
template <int N>
Jet<N> operator+(double b, Jet<N> a) {
  a.v += b;
  return a;
}
template <int N>
Jet<N> operator-(Jet<N> a, double b) {
  a.v -= b;
  return a;
}
template <int N>
Jet<N> operator-(double b, const Jet<N>& a) {
  return Jet<N>(b - a.v, -a.d, -a.dd);
}
template <int N>
Jet<N> operator*(Jet<N> a, double b) {
  return a *= b;
}
template <int N>
Jet<N> operator*(double b, Jet<N> a) {
  return a *= b;
}
template <int N>
Jet<N> operator/(Jet<N> a, double b) {
  return a *= 1.0 / b;
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  const double inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  return a * reciprocal(b);
}
template <int N>
Jet<N> operator/(double a, const Jet<N>& b) {
  return a * reciprocal(b);
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

template <int N>
Jet<N> log(const Jet<N>& a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
  const double s = std::sin(a.v);
  return chain(a, s, std::cos(a.v), -s);
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
  const double c = std::cos(a.v);
  return chain(a, c, -std::sin(a.v), -c);
}

template <int N>
Jet<N> square(const Jet<N>& a) {
  return a * a;
}

inline double square(double a) { return a * a; }

/// Plain value of a scalar or jet.
inline double value_of(double a) { return a; }
template <int N>
double value_of(const Jet<N>& a) {
  return a.v;
}

}  // namespace freeform
