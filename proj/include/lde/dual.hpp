#pragma once

#include <cmath>

namespace lde {

// Forward-mode dual number with a single tangent direction.
struct Dual {
  double v = 0.0;
  double d = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit from constants
  constexpr Dual(double value, double tangent) : v(value), d(tangent) {}

  static constexpr Dual variable(double value) { return {value, 1.0}; }

  constexpr Dual& operator+=(Dual o) { v += o.v; d += o.d; return *this; }
  constexpr Dual& operator-=(Dual o) { v -= o.v; d -= o.d; return *this; }
  constexpr Dual& operator*=(Dual o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  constexpr Dual& operator/=(Dual o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }
};

constexpr Dual operator-(Dual a) { return {-a.v, -a.d}; }
constexpr Dual operator+(Dual a, Dual b) { return a += b; }
constexpr Dual operator-(Dual a, Dual b) { return a -= b; }
constexpr Dual operator*(Dual a, Dual b) { return a *= b; }
constexpr Dual operator/(Dual a, Dual b) { return a /= b; }

inline Dual exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline Dual tanh(Dual a) {
  const double t = std::tanh(a.v);
  return {t, (1.0 - t * t) * a.d};
}
inline Dual pow(Dual a, double n) {
  if (n == 0.0) return {1.0, 0.0};
  return {std::pow(a.v, n), n * std::pow(a.v, n - 1.0) * a.d};
}

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

}  // namespace lde
