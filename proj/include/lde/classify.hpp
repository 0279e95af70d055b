#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lde/dde.hpp"
#include "lde/model.hpp"

namespace lde {

enum class Regime { MonotoneFront, OscillatoryFront, BoundedNonFront, Unbounded, Undetermined };

std::string to_string(Regime r);
bool is_front(Regime r);

struct ClassifyOptions {
  double eps0 = 1e-3;        // radius of the ball around 0
  double dwell = 0.0;        // 0 selects 5 r
  double horizon = 0.0;      // 0 selects 3000 r
  double tol_slope = 1e-8;   // phi' above this counts as an increase
  double delta = kDefaultDelta;
  int branch = -1;
  IntegrateOptions integrate;
};

struct Classification {
  Regime kind = Regime::Undetermined;
  std::optional<double> first_crossing;   // first sign change of phi
  double min_value = 0.0;
  double max_value = 0.0;
  std::optional<double> entry_x;          // start of the final stay inside the ball
  bool dwell_confirmed = false;
  bool monotone = false;                  // phi' <= tol_slope until the first entry into the ball
  double x_end = 0.0;                     // where integration stopped
  double final_value = 0.0;
};

/// Classifies a trajectory. `r` is the history length (max delay).
Classification classify(const DenseTrajectory& traj, double r, const ClassifyOptions& opts = {});

struct Shot {
  Classification classification;
  DenseTrajectory trajectory;
};

/// Integrates the chosen unstable-manifold branch at speed c and classifies it.
/// Integration stops early on blow-up, on confirmed convergence after a sign
/// change, or when the profile underflows.
Shot shoot(const Model& model, double c, const ClassifyOptions& opts = {});
Classification shoot_and_classify(const Model& model, double c, const ClassifyOptions& opts = {});

struct ScanRow {
  double c = 0.0;
  Classification classification;
};

std::vector<ScanRow> scan_speeds(const Model& model, const std::vector<double>& c_list,
                                 const ClassifyOptions& opts = {}, std::size_t workers = 0);

struct BisectionResult {
  double lo = 0.0;               // predicate false
  double hi = 0.0;               // predicate true
  bool converged = false;
  bool predicate_monotone = true;
  std::vector<ScanRow> prescan;
  int iterations = 0;
  std::string note;
  /// Last trajectory on the failing side (candidate psi^1 for the front boundary).
  std::optional<DenseTrajectory> evidence;

  double mid() const { return 0.5 * (lo + hi); }
};

struct BisectionOptions {
  std::optional<double> lo;      // defaults depend on the target
  std::optional<double> hi;
  std::optional<double> width;
  std::size_t prescan_points = 16;
  std::size_t workers = 0;
};

/// Infimum of speeds with a monotone front. Default bracket
/// [0.98 c(grad g(0)), 1.02 c(beta)], width 1e-4 c(beta).
BisectionResult find_c_m(const Model& model, const BisectionOptions& bopts = {},
                         const ClassifyOptions& opts = {});

/// Infimum of the ray of speeds with fronts. Default bracket
/// [b(grad g(0)), 1.02 c(beta)], width 1e-3.
BisectionResult find_c_f(const Model& model, const BisectionOptions& bopts = {},
                         const ClassifyOptions& opts = {});

struct SpeedReport {
  double c_lin = 0.0;
  std::optional<double> c_beta;
  double b_lin = 0.0;
  std::optional<BisectionResult> c_m;
  std::optional<BisectionResult> c_f;
  std::vector<ScanRow> scan_table;
  std::vector<std::string> warnings;
};

/// Linear speeds of a model; bisections are run on request.
SpeedReport speed_report(const Model& model, bool bisect_c_m, bool bisect_c_f,
                         const ClassifyOptions& opts = {}, std::size_t workers = 0);

// ---------------------------------------------------------------------------
// Poincare return map on Sigma = { psi(0) = level, psi >= level on [-r, 0] }.

struct SectionState {
  History psi;
  double x = 0.0;   // position in the trajectory the state was taken from
};

/// First downward crossing x >= from of `level` with phi >= level on [x - r, x].
std::optional<double> section_hit(const DenseTrajectory& traj, double level, double r, double from = 0.0);

struct PoincareReturn {
  double tau = 0.0;
  SectionState next;
  double distance = 0.0;      // sup |P(psi) - psi| on [-r, 0]
  bool fixed_point = false;
  std::optional<double> half_period;   // first upward crossing of -level with phi <= -level on [x - r, x]
  DenseTrajectory trajectory;
};

/// One application of the return map. Throws InvalidArgument when psi is not
/// in the section and ComputationError when there is no return before the horizon.
PoincareReturn poincare_return(const Model& model, double c, double level, const SectionState& psi,
                               double horizon = 0.0, const IntegrateOptions& integ = {});

/// sup over [-r, 0] of |a - b| sampled at n points.
double history_distance(const History& a, const History& b, double r, std::size_t n = 1001);

}  // namespace lde
