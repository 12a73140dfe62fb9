#pragma once

#include <Eigen/Core>
#include <cmath>

namespace locodyn {

// Forward-mode scalar carrying a fixed-width tangent vector. Arithmetic on
// Dual<N> propagates exact directional derivatives through the dynamics
// pipeline; N is the number of independent seed directions.
template <int N>
struct Dual {
  using Tangent = Eigen::Matrix<double, N, 1>;

  double v = 0.0;
  Tangent g = Tangent::Zero();

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit by design
  Dual(double value, int seed) : v(value) { g[seed] = 1.0; }
  Dual(double value, const Tangent& grad) : v(value), g(grad) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    g += o.g;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    g -= o.g;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    g = g * o.v + o.g * v;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    v *= inv;
    g = (g - o.g * v) * inv;
    return *this;
  }

  Dual operator-() const { return Dual(-v, (-g).eval()); }
};

template <int N>
inline Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N>
inline Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N>
inline Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N>
inline Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <int N>
inline Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N>
inline Dual<N> operator+(double a, Dual<N> b) { b.v += a; return b; }
template <int N>
inline Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N>
inline Dual<N> operator-(double a, const Dual<N>& b) {
  return Dual<N>(a - b.v, (-b.g).eval());
}
template <int N>
inline Dual<N> operator*(Dual<N> a, double b) { a.v *= b; a.g *= b; return a; }
template <int N>
inline Dual<N> operator*(double a, Dual<N> b) { b.v *= a; b.g *= a; return b; }
template <int N>
inline Dual<N> operator/(Dual<N> a, double b) {
  const double inv = 1.0 / b;
  a.v *= inv;
  a.g *= inv;
  return a;
}
template <int N>
inline Dual<N> operator/(double a, const Dual<N>& b) {
  const double inv = 1.0 / b.v;
  const double val = a * inv;
  return Dual<N>(val, (-val * inv * b.g).eval());
}

template <int N>
inline bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.v < b.v; }
template <int N>
inline bool operator>(const Dual<N>& a, const Dual<N>& b) { return a.v > b.v; }
template <int N>
inline bool operator<=(const Dual<N>& a, const Dual<N>& b) { return a.v <= b.v; }
template <int N>
inline bool operator>=(const Dual<N>& a, const Dual<N>& b) { return a.v >= b.v; }
template <int N>
inline bool operator<(const Dual<N>& a, double b) { return a.v < b; }
template <int N>
inline bool operator>(const Dual<N>& a, double b) { return a.v > b; }
template <int N>
inline bool operator<(double a, const Dual<N>& b) { return a < b.v; }
template <int N>
inline bool operator>(double a, const Dual<N>& b) { return a > b.v; }

template <int N>
inline Dual<N> sin(const Dual<N>& a) {
  return Dual<N>(std::sin(a.v), (std::cos(a.v) * a.g).eval());
}
template <int N>
inline Dual<N> cos(const Dual<N>& a) {
  return Dual<N>(std::cos(a.v), (-std::sin(a.v) * a.g).eval());
}
template <int N>
inline Dual<N> exp(const Dual<N>& a) {
  const double e = std::exp(a.v);
  return Dual<N>(e, (e * a.g).eval());
}
template <int N>
inline Dual<N> sqrt(const Dual<N>& a) {
  const double s = std::sqrt(a.v);
  return Dual<N>(s, (0.5 / s * a.g).eval());
}
template <int N>
inline Dual<N> abs(const Dual<N>& a) {
  return a.v < 0.0 ? -a : a;
}

// Scalar traits used by the templated dynamics code to strip values.
inline double value_of(double x) { return x; }
template <int N>
inline double value_of(const Dual<N>& x) { return x.v; }

}  // namespace locodyn

namespace Eigen {

template <int N>
struct NumTraits<locodyn::Dual<N>> : NumTraits<double> {
  using Real = locodyn::Dual<N>;
  using NonInteger = locodyn::Dual<N>;
  using Nested = locodyn::Dual<N>;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = N + 1,
    MulCost = 2 * N + 1,
  };
};

template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<locodyn::Dual<N>, double, BinaryOp> {
  using ReturnType = locodyn::Dual<N>;
};
template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<double, locodyn::Dual<N>, BinaryOp> {
  using ReturnType = locodyn::Dual<N>;
};

}  // namespace Eigen
