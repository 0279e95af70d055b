#include "lde/scalar_fn.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "lde/error.hpp"
#include "lde/hermite.hpp"

namespace lde {

ScalarFn::ScalarFn(std::string name, Impl impl) : name_(std::move(name)), impl_(std::move(impl)) {}

PiecewiseBlend::PiecewiseBlend(std::vector<Affine> pieces, std::vector<BlendWindow> windows)
    : pieces_(std::move(pieces)), windows_(std::move(windows)) {
  if (pieces_.size() != windows_.size() + 1) {
    throw InvalidArgument("PiecewiseBlend: need exactly one more piece than blend windows");
  }
  for (std::size_t k = 0; k < windows_.size(); ++k) {
    if (!(windows_[k].lo <= windows_[k].hi)) {
      throw InvalidArgument("PiecewiseBlend: window with lo > hi");
    }
    if (k > 0 && windows_[k].lo < windows_[k - 1].hi) {
      throw InvalidArgument("PiecewiseBlend: overlapping blend windows");
    }
  }
}

ValueSlope PiecewiseBlend::operator()(double s) const {
  std::size_t k = 0;
  for (; k < windows_.size(); ++k) {
    const BlendWindow& w = windows_[k];
    if (s < w.lo) break;
    if (s < w.hi) {
      const Affine& left = pieces_[k];
      const Affine& right = pieces_[k + 1];
      const double h = w.hi - w.lo;
      const double u = (s - w.lo) / h;
      return {hermite_value(u, h, left.at(w.lo), right.at(w.hi), left.slope, right.slope),
              hermite_slope(u, h, left.at(w.lo), right.at(w.hi), left.slope, right.slope)};
    }
  }
  return {pieces_[k].at(s), pieces_[k].slope};
}

ScalarFn make_scalar_fn(std::string name, PiecewiseBlend blend) {
  return ScalarFn(std::move(name), [b = std::move(blend)](double s) { return b(s); });
}

BlendWindow centered_window(double breakpoint, double eps) {
  double half = eps;
  for (double anchor : {0.0, 1.0}) {
    const double dist = std::abs(breakpoint - anchor);
    if (dist > 0.0) half = std::min(half, 0.5 * dist);
  }
  return {breakpoint - half, breakpoint + half};
}

ValueSlope smoothstep(double s, double lo, double hi) {
  if (s <= lo) return {0.0, 0.0};
  if (s >= hi) return {1.0, 0.0};
  const double w = hi - lo;
  const double u = (s - lo) / w;
  return {u * u * (3.0 - 2.0 * u), 6.0 * u * (1.0 - u) / w};
}

}  // namespace lde
