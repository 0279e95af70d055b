#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lde/dual.hpp"

namespace lde {

struct ValueSlope {
  double value = 0.0;
  double slope = 0.0;
};

/// A scalar C^1 function carrying its own derivative. Used for the
/// one-dimensional nonlinearities of the catalog (f in g = -s0 + f(s1),
/// fluxes and sources of upwind discretizations).
class ScalarFn {
 public:
  using Impl = std::function<ValueSlope(double)>;

  ScalarFn() = default;
  ScalarFn(std::string name, Impl impl);

  ValueSlope eval(double s) const { return impl_(s); }
  double operator()(double s) const { return impl_(s).value; }
  Dual operator()(Dual s) const {
    const ValueSlope vs = impl_(s.v);
    return {vs.value, vs.slope * s.d};
  }
  double slope(double s) const { return impl_(s).slope; }

  const std::string& name() const { return name_; }
  explicit operator bool() const { return static_cast<bool>(impl_); }

 private:
  std::string name_;
  Impl impl_;
};

struct Affine {
  double offset = 0.0;
  double slope = 0.0;
  double at(double s) const { return offset + slope * s; }
};

/// Closed interval over which two neighbouring affine pieces are joined.
struct BlendWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Piecewise-affine function whose pieces are joined by cubic Hermite blends.
///
/// Piece k is used between window k-1 and window k. Inside a window the
/// blend matches value and slope of the left piece at `lo` and of the right
/// piece at `hi`, so the result is C^1 whenever every window has positive
/// width. A zero-width window leaves a kink (or jump) at that point.
class PiecewiseBlend {
 public:
  PiecewiseBlend(std::vector<Affine> pieces, std::vector<BlendWindow> windows);

  ValueSlope operator()(double s) const;

  const std::vector<Affine>& pieces() const { return pieces_; }
  const std::vector<BlendWindow>& windows() const { return windows_; }

 private:
  std::vector<Affine> pieces_;
  std::vector<BlendWindow> windows_;
};

ScalarFn make_scalar_fn(std::string name, PiecewiseBlend blend);

/// Symmetric window [a - eps, a + eps], narrowed so that it stays clear of the
/// equilibria 0 and 1 (half-width at most half the distance to either).
BlendWindow centered_window(double breakpoint, double eps);

/// C^1 increasing step from 0 (s <= lo) to 1 (s >= hi), cubic in between.
ValueSlope smoothstep(double s, double lo, double hi);

}  // namespace lde
