#include <algorithm>
#include <cmath>

#include "lde/classify.hpp"
#include "lde/error.hpp"

namespace lde {

namespace {

// Extreme value of phi on [x - r, x]: nodes inside the window plus the endpoints.
template <class Cmp>
double window_extreme(const DenseTrajectory& t, double x, double r, Cmp better) {
  double e = t.value(x);
  const double lo = x - r;
  e = better(t.value(lo), e) ? t.value(lo) : e;
  if (lo < 0.0) {
    for (int k = 0; k <= 200; ++k) {
      const double s = lo + (std::min(x, 0.0) - lo) * k / 200.0;
      if (better(t.value(s), e)) e = t.value(s);
    }
  }
  const auto k0 = static_cast<std::size_t>(std::max(0.0, std::ceil(lo / t.step())));
  for (std::size_t k = k0; k < t.n_nodes() && t.node_x(k) <= x; ++k) {
    if (better(t.node_value(k), e)) e = t.node_value(k);
  }
  return e;
}

double window_min(const DenseTrajectory& t, double x, double r) {
  return window_extreme(t, x, r, [](double a, double b) { return a < b; });
}

double window_max(const DenseTrajectory& t, double x, double r) {
  return window_extreme(t, x, r, [](double a, double b) { return a > b; });
}

constexpr double kWindowTol = 1e-12;

}  // namespace

std::optional<double> section_hit(const DenseTrajectory& traj, double level, double r, double from) {
  double at = from;
  while (true) {
    const auto x = traj.crossing(level, at, -1);
    if (!x) return std::nullopt;
    if (window_min(traj, *x, r) >= level - kWindowTol) return x;
    at = *x + 0.5 * traj.step();
  }
}

double history_distance(const History& a, const History& b, double r, std::size_t n) {
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = -r * static_cast<double>(k) / static_cast<double>(n - 1);
    d = std::max(d, std::abs(a.value(s) - b.value(s)));
  }
  return d;
}

PoincareReturn poincare_return(const Model& model, double c, double level, const SectionState& psi,
                               double horizon, const IntegrateOptions& integ) {
  const double r = model.history_length();
  if (horizon <= 0.0) horizon = 200.0 * r;
  if (std::abs(psi.psi.value(0.0) - level) > 1e-9 * std::max(1.0, std::abs(level))) {
    throw InvalidArgument("poincare_return: psi(0) is not on the section level");
  }
  for (int k = 0; k <= 1000; ++k) {
    if (psi.psi.value(-r * k / 1000.0) < level - 1e-9) {
      throw InvalidArgument("poincare_return: psi drops below the section level on [-r, 0]");
    }
  }

  double prev = level;
  auto stop = [&](const DenseTrajectory& t) {
    const std::size_t k = t.n_nodes() - 1;
    const double y = t.node_value(k), x = t.node_x(k);
    const bool down = prev > level && y <= level;
    prev = y;
    if (!down || x < r) return false;
    const auto xc = t.crossing(level, t.node_x(k - 1), -1);
    return xc && *xc >= r && window_min(t, *xc, r) >= level - kWindowTol;
  };
  DenseTrajectory traj = integrate(model, c, psi.psi, horizon, integ, stop);
  if (traj.blew_up()) throw ComputationError("poincare_return: trajectory blew up before returning");
  const auto tau = section_hit(traj, level, r, r);
  if (!tau) {
    throw ComputationError("poincare_return: no return to the section within the horizon (state not in Sigma')");
  }
  PoincareReturn out{*tau, {traj.window(*tau), psi.x + *tau}, 0.0, false, std::nullopt, traj};
  out.distance = history_distance(out.next.psi, psi.psi, r);
  out.fixed_point = out.distance <= 1e-6;

  double at = 0.0;
  while (true) {
    const auto x = traj.crossing(-level, at, +1);
    if (!x || *x > *tau) break;
    if (window_max(traj, *x, r) <= -level + kWindowTol) {
      out.half_period = x;
      break;
    }
    at = *x + 0.5 * traj.step();
  }
  return out;
}

}  // namespace lde
