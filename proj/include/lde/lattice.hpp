#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lde/classify.hpp"
#include "lde/model.hpp"

namespace lde {

enum class InitialKind { FrontProfile, Step, Bump };

std::string to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);

struct LatticeOptions {
  InitialKind initial = InitialKind::Step;
  double front_c = 0.0;             // speed of the front used for FrontProfile data
  double t_end = 100.0;
  double dt = 0.05;
  double snapshot_every = 1.0;
  std::size_t sites = 0;            // 0: sized from t_end and the fastest linear speed
  std::size_t left_pad = 50;        // sites behind the initial interface
  std::optional<double> left_boundary;   // default 1 for FrontProfile/Step, 0 for Bump
  double m_blow = 50.0;
  ClassifyOptions front;            // used to shoot the FrontProfile front
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
};

/// Sites are p = 0..P-1 at positions x_p = p - origin; the initial interface sits at x = 0.
struct LatticeRun {
  std::vector<Snapshot> snapshots;
  std::size_t origin = 0;
  double left_boundary = 1.0;
  std::vector<std::size_t> shifts;
  std::vector<std::string> warnings;

  double position(std::size_t p) const { return static_cast<double>(p) - static_cast<double>(origin); }
};

/// RK4 in time for u_p' = g(u_p, u_{p-k_1}, ...) with integer delays k_i.
/// Missing left neighbours take the fixed left-boundary value.
LatticeRun simulate(const Model& model, const LatticeOptions& opts = {});

struct SpeedFit {
  double speed = 0.0;
  double residual = 0.0;     // RMS deviation of X(t) from the fitted line
  std::size_t points = 0;
  std::vector<std::pair<double, double>> positions;  // (t, X_theta(t)) for every snapshot
};

/// Least-squares slope of the theta level-set position over the second half of the run.
SpeedFit measure_speed(const LatticeRun& run, double theta = 0.5);

/// Rightmost downward crossing of theta in one snapshot, interpolated linearly.
std::optional<double> level_position(const LatticeRun& run, const Snapshot& snap, double theta);

// ---------------------------------------------------------------------------
// Upwind semi-discretization and its continuum limit

/// Model for cphi' = (flux(phi) - flux(phi(x - eps))) / eps - source(phi) with
/// delay eps, and beta from the recipe beta_1 = (c_* + d)/eps, beta_0 = h_* - beta_1.
/// f(u) = u^2 / 2.
ScalarFn burgers_flux();
/// h(u) = u (1 - u).
ScalarFn logistic_source();

Model upwind_model(const ScalarFn& flux, const ScalarFn& source, double eps, double recipe_margin = 0.1);

struct ContinuumRow {
  double eps = 0.0;
  Regime kind = Regime::Undetermined;
  double gap = 0.0;          // sup gap to the limit ODE profile on the window
};

struct ContinuumReport {
  double c = 0.0;
  double c_star = 0.0;       // sup of flux' on (0,1)
  double window = 0.0;
  std::vector<ContinuumRow> rows;
  bool decreasing = false;
};

/// Compares lattice fronts for each eps with phi' = -h(phi)/(c - f'(phi)) after
/// anchoring both at phi = 1/2, on [-window, window].
ContinuumReport continuum_compare(const ScalarFn& flux, const ScalarFn& source, double c,
                                  const std::vector<double>& eps_list, double window = 8.0,
                                  std::size_t workers = 0);

/// Scalar limit-ODE profile anchored at phi(0) = 1/2, sampled on a uniform grid.
struct LimitProfile {
  double lo = 0.0;
  double step = 0.0;
  std::vector<double> value;
  std::vector<double> slope;
  double operator()(double x) const;
};

LimitProfile limit_profile(const ScalarFn& flux, const ScalarFn& source, double c, double window,
                           double step = 1e-3);

}  // namespace lde
