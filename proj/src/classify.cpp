#include "lde/classify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lde/charspec.hpp"
#include "lde/error.hpp"
#include "lde/parallel.hpp"

namespace lde {

namespace {

// Below this magnitude the profile is numerically zero and sign information is lost.
constexpr double kUnderflow = 1e-250;

double resolve(double v, double fallback) { return v > 0.0 ? v : fallback; }

bool sign_change(double a, double b) { return (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0); }

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::MonotoneFront: return "MonotoneFront";
    case Regime::OscillatoryFront: return "OscillatoryFront";
    case Regime::BoundedNonFront: return "BoundedNonFront";
    case Regime::Unbounded: return "Unbounded";
    case Regime::Undetermined: return "Undetermined";
  }
  return "?";
}

bool is_front(Regime r) { return r == Regime::MonotoneFront || r == Regime::OscillatoryFront; }

Classification classify(const DenseTrajectory& traj, double r, const ClassifyOptions& opts) {
  const double dwell = resolve(opts.dwell, 5.0 * r);
  Classification out;
  const std::size_t n = traj.n_nodes();
  out.x_end = traj.x_end();
  out.final_value = traj.node_value(n - 1);
  out.min_value = out.max_value = traj.node_value(0);

  std::optional<std::size_t> first_entry;
  std::size_t last_outside = n;  // n: never outside
  out.monotone = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double y = traj.node_value(k);
    out.min_value = std::min(out.min_value, y);
    out.max_value = std::max(out.max_value, y);
    const bool inside = std::abs(y) <= opts.eps0;
    if (inside && !first_entry) first_entry = k;
    if (!inside) last_outside = k;
    if (!first_entry && traj.node_slope(k) > opts.tol_slope) out.monotone = false;
    if (!out.first_crossing && k + 1 < n && sign_change(y, traj.node_value(k + 1))) {
      out.first_crossing = traj.crossing(0.0, traj.node_x(k));
    }
  }
  if (traj.blew_up()) {
    out.kind = Regime::Unbounded;
    return out;
  }
  const std::size_t entry = last_outside == n ? 0 : last_outside + 1;
  if (entry < n) {
    out.entry_x = traj.node_x(entry);
    // Measured from the last node outside the ball, matching the early stop in shoot().
    const double since = last_outside == n ? out.x_end : out.x_end - traj.node_x(last_outside);
    out.dwell_confirmed = since >= dwell * (1.0 - 1e-12);
  }
  if (out.dwell_confirmed) {
    out.kind = out.monotone && !out.first_crossing ? Regime::MonotoneFront : Regime::OscillatoryFront;
  } else if (out.entry_x) {
    out.kind = Regime::Undetermined;
  } else {
    out.kind = Regime::BoundedNonFront;
  }
  return out;
}

Shot shoot(const Model& model, double c, const ClassifyOptions& opts) {
  const double r = model.history_length();
  const double dwell = resolve(opts.dwell, 5.0 * r);
  const double horizon = resolve(opts.horizon, 3000.0 * r);
  const TailSpec tail = make_tail(model, c, opts.branch, opts.delta);

  bool crossed = false;
  double last_outside = 0.0;
  double last_resolved = 0.0;
  double prev = tail.value(0.0);
  auto stop = [&](const DenseTrajectory& t) {
    const std::size_t k = t.n_nodes() - 1;
    const double y = t.node_value(k), x = t.node_x(k);
    if (sign_change(prev, y)) crossed = true;
    prev = y;
    if (std::abs(y) > opts.eps0) last_outside = x;
    if (std::abs(y) >= kUnderflow) last_resolved = x;
    const bool settled = x - last_outside >= dwell;
    return settled && (crossed || x - last_resolved >= r);
  };
  DenseTrajectory traj = integrate(model, c, tail, horizon, opts.integrate, stop);
  Classification cls = classify(traj, r, opts);
  return {cls, std::move(traj)};
}

Classification shoot_and_classify(const Model& model, double c, const ClassifyOptions& opts) {
  return shoot(model, c, opts).classification;
}

std::vector<ScanRow> scan_speeds(const Model& model, const std::vector<double>& c_list,
                                 const ClassifyOptions& opts, std::size_t workers) {
  for (std::size_t i = 0; i < c_list.size(); ++i) {
    if (!(c_list[i] > 0.0)) throw InvalidArgument("scan_speeds: speeds must be positive");
    if (i > 0 && !(c_list[i] > c_list[i - 1])) throw InvalidArgument("scan_speeds: speeds must be ascending");
  }
  return parallel_map(
      c_list.size(), [&](std::size_t i) { return ScanRow{c_list[i], shoot_and_classify(model, c_list[i], opts)}; },
      workers);
}

namespace {

template <class Pred>
BisectionResult bisect(const Model& model, Pred pred, double lo, double hi, double width,
                       const BisectionOptions& bopts, const ClassifyOptions& opts, const char* what) {
  if (!(lo < hi)) throw InvalidArgument(std::string(what) + ": bracket must satisfy lo < hi");
  if (bopts.prescan_points < 2) throw InvalidArgument(std::string(what) + ": need at least 2 prescan points");
  BisectionResult res;
  const std::size_t m = bopts.prescan_points;
  std::vector<double> cs(m);
  for (std::size_t k = 0; k < m; ++k) cs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
  res.prescan = scan_speeds(model, cs, opts, bopts.workers);

  std::vector<bool> p(m);
  for (std::size_t k = 0; k < m; ++k) p[k] = pred(res.prescan[k].classification.kind);
  if (std::all_of(p.begin(), p.end(), [&](bool v) { return v == p[0]; })) {
    std::ostringstream os;
    os << what << ": predicate is " << (p[0] ? "true" : "false") << " at every prescan point of [" << lo << ", "
       << hi << "]; the bracket does not straddle the threshold";
    throw BracketError(os.str());
  }
  std::size_t first_true = m;
  for (std::size_t k = 0; k < m; ++k) {
    if (p[k]) {
      first_true = k;
      break;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (p[k] != (k >= first_true)) res.predicate_monotone = false;
  }
  if (!res.predicate_monotone) {
    std::ostringstream os;
    os << "predicate is not monotone in c on the prescan:";
    for (std::size_t k = 0; k < m; ++k) os << ' ' << res.prescan[k].c << '=' << (p[k] ? 'T' : 'F');
    res.note = os.str();
    res.lo = lo;
    res.hi = hi;
    return res;
  }
  double a = cs[first_true - 1], b = cs[first_true];
  while (b - a > width) {
    const double mid = 0.5 * (a + b);
    (pred(shoot_and_classify(model, mid, opts).kind) ? b : a) = mid;
    ++res.iterations;
  }
  res.lo = a;
  res.hi = b;
  res.converged = true;
  return res;
}

}  // namespace

BisectionResult find_c_m(const Model& model, const BisectionOptions& bopts, const ClassifyOptions& opts) {
  const double c_lin = critical_speed({model.grad0, model.kappa});
  std::optional<double> c_beta;
  if (model.beta) c_beta = critical_speed({*model.beta, model.kappa});
  if (!bopts.hi && !c_beta) throw InvalidArgument("find_c_m: model has no beta; supply the upper bracket end");
  const double lo = bopts.lo.value_or(0.98 * c_lin);
  const double hi = bopts.hi.value_or(1.02 * *c_beta);
  const double width = bopts.width.value_or(1e-4 * c_beta.value_or(hi));
  return bisect(model, [](Regime r) { return r == Regime::MonotoneFront; }, lo, hi, width, bopts, opts,
                "find_c_m");
}

BisectionResult find_c_f(const Model& model, const BisectionOptions& bopts, const ClassifyOptions& opts) {
  const double b_lin = stability_threshold({model.grad0, model.kappa});
  std::optional<double> c_beta;
  if (model.beta) c_beta = critical_speed({*model.beta, model.kappa});
  if (!bopts.hi && !c_beta) throw InvalidArgument("find_c_f: model has no beta; supply the upper bracket end");
  const double lo = bopts.lo.value_or(b_lin);
  if (lo < b_lin * (1.0 - 1e-12)) {
    throw InvalidArgument("find_c_f: lower bracket end must be at least b(grad g(0)) = " + std::to_string(b_lin));
  }
  const double hi = bopts.hi.value_or(1.02 * *c_beta);
  const double width = bopts.width.value_or(1e-3);
  BisectionResult res =
      bisect(model, [](Regime r) { return is_front(r); }, lo, hi, width, bopts, opts, "find_c_f");
  if (res.converged) res.evidence = shoot(model, res.lo, opts).trajectory;
  return res;
}

SpeedReport speed_report(const Model& model, bool bisect_c_m, bool bisect_c_f, const ClassifyOptions& opts,
                         std::size_t workers) {
  SpeedReport rep;
  const LinearCoeffs lin{model.grad0, model.kappa};
  rep.c_lin = critical_speed(lin);
  rep.b_lin = stability_threshold(lin);
  if (model.beta) rep.c_beta = critical_speed({*model.beta, model.kappa});
  BisectionOptions bopts;
  bopts.workers = workers;
  if (bisect_c_m) rep.c_m = find_c_m(model, bopts, opts);
  if (bisect_c_f) rep.c_f = find_c_f(model, bopts, opts);
  if (rep.c_m && rep.c_m->converged) {
    if (rep.c_m->hi < rep.c_lin) rep.warnings.push_back("c_m bracket lies below c(grad g(0))");
    if (rep.c_beta && rep.c_m->lo > *rep.c_beta) rep.warnings.push_back("c_m bracket lies above c(beta)");
  }
  if (rep.c_m && rep.c_f && rep.c_m->converged && rep.c_f->converged && rep.c_f->lo > rep.c_m->hi) {
    rep.warnings.push_back("c_f bracket lies above the c_m bracket");
  }
  return rep;
}

}  // namespace lde
