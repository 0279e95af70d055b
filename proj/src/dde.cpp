#include "lde/dde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lde/charspec.hpp"
#include "lde/error.hpp"
#include "lde/hermite.hpp"

namespace lde {

double TailSpec::value(double x) const { return 1.0 + branch * delta * std::exp(lambda_u * x); }

double TailSpec::slope(double x) const { return branch * delta * lambda_u * std::exp(lambda_u * x); }

History TailSpec::history() const {
  const TailSpec t = *this;
  return {[t](double x) { return t.value(x); }, [t](double x) { return t.slope(x); }};
}

TailSpec make_tail(const Model& model, double c, int branch, double delta) {
  if (branch != -1 && branch != 1) throw InvalidArgument("tail branch must be -1 or +1");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("tail amplitude must be positive");
  TailSpec t{branch, delta, unstable_root_at_one(c, model.grad1, model.kappa)};
  if (delta > 1e-3) {
    // Accept only if the linear tail is an exact solution of the profile equation.
    std::vector<double> s(model.kappa.size() + 1);
    const double span = 40.0 / t.lambda_u;
    for (int k = 0; k <= 400; ++k) {
      const double x = -span * k / 400.0;
      s[0] = t.value(x);
      for (std::size_t i = 0; i < model.kappa.size(); ++i) s[i + 1] = t.value(x - model.kappa[i]);
      const double res = c * t.slope(x) + model(s);
      if (std::abs(res) > 1e-12) {
        throw InvalidArgument("tail amplitude " + std::to_string(delta) +
                              " exceeds 1e-3 and the linear tail is not exact for this model (residual " +
                              std::to_string(res) + " at x = " + std::to_string(x) + ")");
      }
    }
  }
  return t;
}

DenseTrajectory::DenseTrajectory(std::shared_ptr<const Feedback> g, std::vector<double> kappa, double c,
                                 double step, History history)
    : g_(std::move(g)), kappa_(std::move(kappa)), c_(c), h_(step), history_(std::move(history)) {}

double DenseTrajectory::value(double x) const {
  if (x <= 0.0) return history_.value(x);
  const double pos = x / h_;
  auto j = static_cast<std::size_t>(std::ceil(pos)) - 1;  // left segment at an exact node
  if (j + 1 >= y_.size()) {
    if (x <= x_end() * (1.0 + 1e-14)) return y_.back();
    throw InvalidArgument("trajectory evaluated beyond its end");
  }
  const double u = pos - static_cast<double>(j);
  return hermite_value(u, h_, y_[j], y_[j + 1], dy_[j], dy_[j + 1]);
}

double DenseTrajectory::slope(double x) const {
  if (x <= 0.0) return history_.slope(x);
  const double pos = x / h_;
  auto j = static_cast<std::size_t>(std::ceil(pos)) - 1;
  if (j + 1 >= y_.size()) {
    if (x <= x_end() * (1.0 + 1e-14)) return dy_.back();
    throw InvalidArgument("trajectory evaluated beyond its end");
  }
  const double u = pos - static_cast<double>(j);
  return hermite_slope(u, h_, y_[j], y_[j + 1], dy_[j], dy_[j + 1]);
}

double DenseTrajectory::residual(double x) const {
  std::vector<double> s(kappa_.size() + 1);
  s[0] = value(x);
  for (std::size_t i = 0; i < kappa_.size(); ++i) s[i + 1] = value(x - kappa_[i]);
  return c_ * slope(x) + (*g_)(std::span<const double>(s));
}

std::optional<double> DenseTrajectory::crossing(double level, double from, int direction) const {
  const std::size_t start = from <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(from / h_));
  for (std::size_t k = start; k + 1 < y_.size(); ++k) {
    const double a = y_[k] - level, b = y_[k + 1] - level;
    const bool down = a > 0.0 && b <= 0.0;
    const bool up = a < 0.0 && b >= 0.0;
    if (!((direction <= 0 && down) || (direction >= 0 && up))) continue;
    double lo = node_x(k), hi = node_x(k + 1);
    if (hi < from) continue;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double v = value(mid) - level;
      if ((v > 0.0) == (a > 0.0)) lo = mid; else hi = mid;
    }
    const double x = 0.5 * (lo + hi);
    if (x >= from) return x;
  }
  return std::nullopt;
}

History DenseTrajectory::window(double at) const {
  // The trajectory is copied into the closures so the window outlives it.
  auto self = std::make_shared<const DenseTrajectory>(*this);
  return {[self, at](double x) { return self->value(x + at); },
          [self, at](double x) { return self->slope(x + at); }};
}

double default_step(const Model& model) { return model.min_delay() / 50.0; }

DenseTrajectory integrate(const Model& model, double c, const History& history, double x_end,
                          const IntegrateOptions& options,
                          const std::function<bool(const DenseTrajectory&)>& stop) {
  if (!(c > 0.0)) throw InvalidArgument("integrate: c must be positive");
  if (!(x_end > 0.0)) throw InvalidArgument("integrate: x_end must be positive");
  const double h = options.step > 0.0 ? options.step : default_step(model);
  if (h > model.min_delay() / 4.0) {
    throw InvalidArgument("integrate: step " + std::to_string(h) + " exceeds min(kappa)/4");
  }
  DenseTrajectory t(model.g, model.kappa, c, h, history);
  const auto n_steps = static_cast<std::size_t>(std::ceil(x_end / h - 1e-9));
  t.y_.reserve(n_steps + 1);
  t.dy_.reserve(n_steps + 1);

  const std::size_t n = model.kappa.size();
  std::vector<double> s(n + 1);
  auto rhs = [&](double x, double yx) {
    s[0] = yx;
    for (std::size_t i = 0; i < n; ++i) s[i + 1] = t.value(x - model.kappa[i]);
    const double gv = model(s);
    if (!std::isfinite(gv)) {
      throw ComputationError("integrate: non-finite feedback value at x = " + std::to_string(x));
    }
    return -gv / c;
  };

  const double y0 = history.value(0.0);
  t.y_.push_back(y0);
  t.dy_.push_back(0.0);
  // The derivative at node 0 is the right derivative; delayed values come from the history.
  t.dy_[0] = rhs(0.0, y0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double x = t.node_x(k);
    const double y = t.y_[k];
    const double k1 = t.dy_[k];
    const double k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = rhs(x + h, y + h * k3);
    const double y1 = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t.y_.push_back(y1);
    t.dy_.push_back(0.0);
    t.dy_.back() = std::isfinite(y1) && std::abs(y1) <= options.m_blow ? rhs(x + h, y1) : 0.0;
    if (!std::isfinite(y1) || std::abs(y1) > options.m_blow) {
      t.blew_up_ = true;
      t.blow_x_ = x + h;
      break;
    }
    if (stop && stop(t)) break;
  }
  return t;
}

DenseTrajectory integrate(const Model& model, double c, const TailSpec& tail, double x_end,
                          const IntegrateOptions& options,
                          const std::function<bool(const DenseTrajectory&)>& stop) {
  return integrate(model, c, tail.history(), x_end, options, stop);
}

ConvergenceEstimate convergence_check(const Model& model, double c, const TailSpec& tail, double x_end,
                                      double step) {
  const double h = step > 0.0 ? step : default_step(model);
  const DenseTrajectory a = integrate(model, c, tail, x_end, {h});
  const DenseTrajectory b = integrate(model, c, tail, x_end, {h / 2});
  const DenseTrajectory q = integrate(model, c, tail, x_end, {h / 4});
  ConvergenceEstimate e;
  const std::size_t n = std::min({a.n_nodes(), (b.n_nodes() + 1) / 2, (q.n_nodes() + 3) / 4});
  for (std::size_t k = 0; k < n; ++k) {
    e.diff_h = std::max(e.diff_h, std::abs(a.node_value(k) - b.node_value(2 * k)));
    e.diff_h2 = std::max(e.diff_h2, std::abs(b.node_value(2 * k) - q.node_value(4 * k)));
  }
  e.ratio = e.diff_h2 > 0.0 ? e.diff_h / e.diff_h2 : 0.0;
  return e;
}

std::optional<double> anchor(const DenseTrajectory& t, double level) { return t.crossing(level, 0.0, -1); }

double profile_gap(const DenseTrajectory& a, const DenseTrajectory& b, double lo, double hi, std::size_t n,
                   double level) {
  const auto xa = anchor(a, level), xb = anchor(b, level);
  if (!xa || !xb) throw ComputationError("profile_gap: a trajectory never crosses the anchor level");
  double gap = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    const double pa = *xa + s, pb = *xb + s;
    if (pa > a.x_end() || pb > b.x_end()) {
      throw ComputationError("profile_gap: comparison window extends beyond a trajectory");
    }
    gap = std::max(gap, std::abs(a.value(pa) - b.value(pb)));
  }
  return gap;
}

}  // namespace lde
