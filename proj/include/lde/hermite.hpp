#pragma once

namespace lde {

// Cubic Hermite interpolant on a segment of width h, local coordinate u in [0, 1].
inline double hermite_value(double u, double h, double y0, double y1, double d0, double d1) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * h * d0 +
         (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * h * d1;
}

inline double hermite_slope(double u, double h, double y0, double y1, double d0, double d1) {
  const double u2 = u * u;
  return ((6.0 * u2 - 6.0 * u) * y0 + (-6.0 * u2 + 6.0 * u) * y1) / h +
         (3.0 * u2 - 4.0 * u + 1.0) * d0 + (3.0 * u2 - 2.0 * u) * d1;
}

}  // namespace lde
