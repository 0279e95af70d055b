#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lde/model.hpp"

namespace lde {

/// History of a wave profile on (-inf, 0]: value and derivative.
struct History {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

/// Linear approximation of one branch of the unstable manifold at 1:
/// phi(x) = 1 + branch * delta * exp(lambda_u x) for x <= 0.
struct TailSpec {
  int branch = -1;
  double delta = 1e-6;
  double lambda_u = 0.0;

  double value(double x) const;
  double slope(double x) const;
  History history() const;
};

/// Default tail amplitude.
inline constexpr double kDefaultDelta = 1e-6;

/// Builds the tail at speed c. delta must lie in (0, 1e-3]; larger amplitudes
/// are accepted only when the linear tail solves the profile equation exactly
/// (g affine along the tail), as for feedbacks that are constant near 1.
TailSpec make_tail(const Model& model, double c, int branch, double delta = kDefaultDelta);

struct IntegrateOptions {
  double step = 0.0;       // 0 selects min(kappa) / 50
  double m_blow = 50.0;    // stop when |phi| exceeds this
};

/// Piecewise cubic Hermite solution of c phi'(x) = -g(phi(x), phi(x - kappa_1), ...)
/// on [0, x_end] on a uniform grid, with the history used for x <= 0.
class DenseTrajectory {
 public:
  DenseTrajectory(std::shared_ptr<const Feedback> g, std::vector<double> kappa, double c, double step,
                  History history);

  double c() const { return c_; }
  double step() const { return h_; }
  double x_end() const { return h_ * static_cast<double>(y_.size() - 1); }
  std::size_t n_nodes() const { return y_.size(); }
  double node_x(std::size_t k) const { return h_ * static_cast<double>(k); }
  double node_value(std::size_t k) const { return y_[k]; }
  double node_slope(std::size_t k) const { return dy_[k]; }
  const std::vector<double>& kappa() const { return kappa_; }

  double value(double x) const;
  double slope(double x) const;
  double operator()(double x) const { return value(x); }

  /// c phi'(x) + g(Phi(x)) evaluated from the dense output.
  double residual(double x) const;

  bool blew_up() const { return blew_up_; }
  double blow_x() const { return blow_x_; }

  /// First x >= from at which phi crosses `level` in the given direction
  /// (-1 downward, +1 upward, 0 either), located on the Hermite interpolant.
  std::optional<double> crossing(double level, double from = 0.0, int direction = 0) const;

  /// Shifted history window x -> phi(x + at), for restarting integration.
  History window(double at) const;

 private:
  friend DenseTrajectory integrate(const Model&, double, const History&, double, const IntegrateOptions&,
                                   const std::function<bool(const DenseTrajectory&)>&);

  std::shared_ptr<const Feedback> g_;
  std::vector<double> kappa_;
  double c_;
  double h_;
  History history_;
  std::vector<double> y_;
  std::vector<double> dy_;
  bool blew_up_ = false;
  double blow_x_ = 0.0;
};

/// Method-of-steps RK4. `stop` is consulted after every accepted step and
/// ends the integration early when it returns true.
DenseTrajectory integrate(const Model& model, double c, const History& history, double x_end,
                          const IntegrateOptions& options = {},
                          const std::function<bool(const DenseTrajectory&)>& stop = {});
DenseTrajectory integrate(const Model& model, double c, const TailSpec& tail, double x_end,
                          const IntegrateOptions& options = {},
                          const std::function<bool(const DenseTrajectory&)>& stop = {});

double default_step(const Model& model);

struct ConvergenceEstimate {
  double diff_h = 0.0;    // max |phi_h - phi_{h/2}| on the coarse grid
  double diff_h2 = 0.0;   // max |phi_{h/2} - phi_{h/4}| on the coarse grid
  double ratio = 0.0;     // diff_h / diff_h2, about 16 for a fourth-order scheme
};

ConvergenceEstimate convergence_check(const Model& model, double c, const TailSpec& tail, double x_end,
                                      double step = 0.0);

/// First downward crossing of `level`, used to fix the translation of a front.
std::optional<double> anchor(const DenseTrajectory& t, double level = 0.5);

/// sup |a(xa + s) - b(xb + s)| for s in [lo, hi] sampled at n points, where
/// xa and xb are the anchors of a and b.
double profile_gap(const DenseTrajectory& a, const DenseTrajectory& b, double lo, double hi,
                   std::size_t n = 2001, double level = 0.5);

}  // namespace lde
