#include "lde/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lde/charspec.hpp"
#include "lde/error.hpp"
#include "lde/hermite.hpp"
#include "lde/hypotheses.hpp"
#include "lde/parallel.hpp"

namespace lde {

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::FrontProfile: return "front-profile";
    case InitialKind::Step: return "step";
    case InitialKind::Bump: return "bump";
  }
  return "?";
}

InitialKind initial_kind_from_string(const std::string& s) {
  if (s == "front-profile" || s == "front") return InitialKind::FrontProfile;
  if (s == "step") return InitialKind::Step;
  if (s == "bump") return InitialKind::Bump;
  throw InvalidArgument("unknown initial data '" + s + "' (front-profile, step, bump)");
}

namespace {

// sup of flux' over [0, 1]; f' is continuous, so this is also the sup over (0, 1).
double sup_flux_slope(const ScalarFn& flux) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 10000; ++k) best = std::max(best, flux.slope(k / 10000.0));
  return best;
}

double max_linear_speed(const Model& m) {
  double c = 0.0;
  try {
    c = critical_speed({m.grad0, m.kappa});
    if (m.beta) c = std::max(c, critical_speed({*m.beta, m.kappa}));
  } catch (const std::exception&) {
    c = 0.0;
  }
  return c;
}

}  // namespace

LatticeRun simulate(const Model& model, const LatticeOptions& opts) {
  if (!(opts.t_end > 0.0) || !(opts.dt > 0.0) || !(opts.snapshot_every > 0.0)) {
    throw InvalidArgument("simulate: t_end, dt and snapshot interval must be positive");
  }
  LatticeRun run;
  for (double k : model.kappa) {
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-12 || r < 1.0) {
      throw InvalidArgument("simulate: direct simulation needs integer lattice delays (got " + std::to_string(k) + ")");
    }
    run.shifts.push_back(static_cast<std::size_t>(r));
  }
  const std::size_t max_shift = *std::max_element(run.shifts.begin(), run.shifts.end());
  run.left_boundary = opts.left_boundary.value_or(opts.initial == InitialKind::Bump ? 0.0 : 1.0);
  if (run.left_boundary != 0.0 && run.left_boundary != 1.0) {
    throw InvalidArgument("simulate: left boundary value must be 0 or 1");
  }

  double c_max = std::max(max_linear_speed(model), opts.front_c);
  if (!(c_max > 0.0)) c_max = 1.0;
  run.origin = opts.left_pad;
  const std::size_t P = opts.sites > 0 ? opts.sites
                                       : run.origin + static_cast<std::size_t>(std::ceil(1.25 * c_max * opts.t_end)) + 50;
  if (P <= 10 * max_shift) throw InvalidArgument("simulate: need more than 10 max offset sites");

  // dt restriction from the local rate |dg/ds0| on the diagonal.
  double rate = 0.0;
  {
    const std::size_t n = model.kappa.size() + 1;
    std::vector<Dual> s(n);
    for (int k = 0; k <= 100; ++k) {
      const double a = k / 100.0;
      s[0] = Dual(a, 1.0);
      for (std::size_t i = 1; i < n; ++i) s[i] = Dual(a, 0.0);
      rate = std::max(rate, std::abs((*model.g)(std::span<const Dual>(s)).d));
    }
  }
  if (rate > 0.0 && opts.dt > 0.1 / rate) {
    std::ostringstream os;
    os << "dt = " << opts.dt << " exceeds 0.1 / max|dg/ds0| = " << 0.1 / rate;
    run.warnings.push_back(os.str());
  }

  std::vector<double> u(P, 0.0);
  switch (opts.initial) {
    case InitialKind::Step:
      for (std::size_t p = 0; p < P; ++p) u[p] = run.position(p) < 0.0 ? 1.0 : 0.0;
      break;
    case InitialKind::Bump:
      for (std::size_t p = 0; p < P; ++p) u[p] = run.position(p) >= 0.0 && run.position(p) < 5.0 ? 1.0 : 0.0;
      break;
    case InitialKind::FrontProfile: {
      if (!(opts.front_c > 0.0)) throw InvalidArgument("simulate: front-profile data needs a positive front speed");
      Shot shot = shoot(model, opts.front_c, opts.front);
      if (!is_front(shot.classification.kind)) {
        throw ComputationError("simulate: no front at c = " + std::to_string(opts.front_c) + " (" +
                               to_string(shot.classification.kind) + ")");
      }
      const auto a = anchor(shot.trajectory);
      if (!a) throw ComputationError("simulate: front never crosses 1/2");
      for (std::size_t p = 0; p < P; ++p) {
        const double x = *a + run.position(p);
        u[p] = x <= shot.trajectory.x_end() ? shot.trajectory.value(x) : shot.trajectory.node_value(shot.trajectory.n_nodes() - 1);
      }
      break;
    }
  }

  const std::size_t n = model.kappa.size() + 1;
  std::vector<double> k1(P), k2(P), k3(P), k4(P), tmp(P);
  std::vector<double> s(n);
  auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t p = 0; p < P; ++p) {
      s[0] = v[p];
      for (std::size_t i = 0; i < run.shifts.size(); ++i) {
        s[i + 1] = p >= run.shifts[i] ? v[p - run.shifts[i]] : run.left_boundary;
      }
      out[p] = model(s);
    }
  };

  const auto n_steps = static_cast<std::size_t>(std::llround(opts.t_end / opts.dt));
  const double dt = opts.t_end / static_cast<double>(n_steps);
  const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.snapshot_every / dt)));
  run.snapshots.push_back({0.0, u});
  for (std::size_t step = 1; step <= n_steps; ++step) {
    rhs(u, k1);
    for (std::size_t p = 0; p < P; ++p) tmp[p] = u[p] + 0.5 * dt * k1[p];
    rhs(tmp, k2);
    for (std::size_t p = 0; p < P; ++p) tmp[p] = u[p] + 0.5 * dt * k2[p];
    rhs(tmp, k3);
    for (std::size_t p = 0; p < P; ++p) tmp[p] = u[p] + dt * k3[p];
    rhs(tmp, k4);
    for (std::size_t p = 0; p < P; ++p) {
      u[p] += dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
      if (!(std::abs(u[p]) <= opts.m_blow)) {
        throw ComputationError("simulate: blow-up at site " + std::to_string(p) + ", t = " +
                               std::to_string(step * dt));
      }
    }
    if (step % every == 0 || step == n_steps) run.snapshots.push_back({step * dt, u});
  }
  return run;
}

std::optional<double> level_position(const LatticeRun& run, const Snapshot& snap, double theta) {
  const auto& u = snap.u;
  for (std::size_t p = u.size() - 1; p-- > 0;) {
    if (u[p] > theta && u[p + 1] <= theta) {
      if (p + 2 >= u.size()) return std::nullopt;
      return run.position(p) + (u[p] - theta) / (u[p] - u[p + 1]);
    }
  }
  return std::nullopt;
}

SpeedFit measure_speed(const LatticeRun& run, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("measure_speed: theta must lie in (0, 1)");
  if (run.snapshots.size() < 3) throw InvalidArgument("measure_speed: need at least 3 snapshots");
  SpeedFit fit;
  const double t_end = run.snapshots.back().t;
  for (const auto& snap : run.snapshots) {
    const auto x = level_position(run, snap, theta);
    if (!x) {
      throw ComputationError("measure_speed: the level set is missing or has left the domain at t = " +
                             std::to_string(snap.t) + " (use more sites or a shorter run)");
    }
    fit.positions.emplace_back(snap.t, *x);
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& pt : fit.positions) {
    if (pt.first >= 0.5 * t_end) pts.push_back(pt);
  }
  if (pts.size() < 2) throw ComputationError("measure_speed: too few snapshots in the second half");
  const double n = static_cast<double>(pts.size());
  double mt = 0.0, mx = 0.0;
  for (const auto& [t, x] : pts) {
    mt += t / n;
    mx += x / n;
  }
  double stt = 0.0, stx = 0.0;
  for (const auto& [t, x] : pts) {
    stt += (t - mt) * (t - mt);
    stx += (t - mt) * (x - mx);
  }
  fit.speed = stx / stt;
  double ss = 0.0;
  for (const auto& [t, x] : pts) {
    const double e = x - (mx + fit.speed * (t - mt));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = pts.size();
  return fit;
}

ScalarFn burgers_flux() {
  return ScalarFn("burgers", [](double u) { return ValueSlope{0.5 * u * u, u}; });
}

ScalarFn logistic_source() {
  return ScalarFn("logistic", [](double u) { return ValueSlope{u * (1.0 - u), 1.0 - 2.0 * u}; });
}

Model upwind_model(const ScalarFn& flux, const ScalarFn& source, double eps, double recipe_margin) {
  if (!(eps > 0.0)) throw InvalidArgument("upwind_model: eps must be positive");
  const double c_star = sup_flux_slope(flux);
  // sup of h(s)/s on (0, 1], with the limit h'(0) at s = 0.
  double h_star = source.slope(0.0);
  for (int k = 1; k <= 10000; ++k) {
    const double s = k / 10000.0;
    h_star = std::max(h_star, source(s) / s);
  }
  const double b1 = (c_star + recipe_margin) / eps;
  auto g = std::make_shared<UpwindFeedback>(flux, source, eps);
  std::ostringstream name;
  name << "upwind(" << flux.name() << "," << source.name() << ",eps=" << eps << ")";
  Model m = make_model(name.str(), {eps}, g, std::vector<double>{h_star - b1, b1}, 0.0);
  m.params = {{"eps", eps}};
  return m;
}

double LimitProfile::operator()(double x) const {
  const double pos = (x - lo) / step;
  if (pos < 0.0 || pos > static_cast<double>(value.size() - 1)) {
    throw InvalidArgument("limit profile evaluated outside its window");
  }
  const auto j = std::min(static_cast<std::size_t>(pos), value.size() - 2);
  return hermite_value(pos - static_cast<double>(j), step, value[j], value[j + 1], slope[j], slope[j + 1]);
}

LimitProfile limit_profile(const ScalarFn& flux, const ScalarFn& source, double c, double window, double step) {
  auto f = [&](double phi) { return -source(phi) / (c - flux.slope(phi)); };
  const auto half = static_cast<std::size_t>(std::ceil(window / step));
  std::vector<double> fwd{0.5}, bwd{0.5};
  for (std::size_t k = 0; k < half; ++k) {
    for (int dir : {1, -1}) {
      std::vector<double>& v = dir > 0 ? fwd : bwd;
      const double h = dir * step;
      const double y = v.back();
      const double a = f(y), b = f(y + 0.5 * h * a), cc = f(y + 0.5 * h * b), d = f(y + h * cc);
      v.push_back(y + h / 6.0 * (a + 2.0 * b + 2.0 * cc + d));
    }
  }
  LimitProfile lp;
  lp.step = step;
  lp.lo = -static_cast<double>(half) * step;
  lp.value.assign(bwd.rbegin(), bwd.rend());
  lp.value.insert(lp.value.end(), fwd.begin() + 1, fwd.end());
  for (double v : lp.value) lp.slope.push_back(f(v));
  return lp;
}

ContinuumReport continuum_compare(const ScalarFn& flux, const ScalarFn& source, double c,
                                  const std::vector<double>& eps_list, double window, std::size_t workers) {
  ContinuumReport rep;
  rep.c = c;
  rep.window = window;
  rep.c_star = sup_flux_slope(flux);
  double h_scale = 0.0;
  for (int k = 1; k < 10000; ++k) h_scale = std::max(h_scale, std::abs(source(k / 10000.0)));
  if (h_scale == 0.0) {
    throw InvalidArgument("continuum_compare: source h vanishes on (0,1); conservation laws are excluded");
  }
  if (!(c > rep.c_star)) {
    throw InvalidArgument("continuum_compare: need c > sup f' = " + std::to_string(rep.c_star));
  }
  for (double eps : eps_list) {
    const Model m = upwind_model(flux, source, eps);
    const ClauseReport g11 = check_hypotheses(m, {}).clause("G1.1");
    if (g11.status == Status::Violated) {
      throw InvalidArgument("continuum_compare: g vanishes inside (0,1) on the diagonal for eps = " +
                            std::to_string(eps));
    }
    const ClauseReport low = check_G13_lower(m);
    if (low.status == Status::Violated) {
      throw InvalidArgument("continuum_compare: g(s) > 0 fails on {0 < s0 < s1 < 1} for eps = " +
                            std::to_string(eps));
    }
  }
  const LimitProfile lp = limit_profile(flux, source, c, window + 1.0);
  rep.rows = parallel_map(
      eps_list.size(),
      [&](std::size_t i) {
        const double eps = eps_list[i];
        const Model m = upwind_model(flux, source, eps);
        ClassifyOptions opts;
        opts.horizon = 100.0 + 4.0 * window;
        Shot shot = shoot(m, c, opts);
        ContinuumRow row{eps, shot.classification.kind, 0.0};
        const auto a = anchor(shot.trajectory);
        if (!a) throw ComputationError("continuum_compare: lattice profile never crosses 1/2");
        const std::size_t n = 4001;
        for (std::size_t k = 0; k < n; ++k) {
          const double s = -window + 2.0 * window * static_cast<double>(k) / static_cast<double>(n - 1);
          row.gap = std::max(row.gap, std::abs(shot.trajectory.value(*a + s) - lp(s)));
        }
        return row;
      },
      workers);
  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const bool finer = rep.rows[i].eps < rep.rows[i - 1].eps;
    if (finer && !(rep.rows[i].gap < rep.rows[i - 1].gap)) rep.decreasing = false;
  }
  return rep;
}

}  // namespace lde
