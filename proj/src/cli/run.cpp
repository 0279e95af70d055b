#include "cli/run.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

#include "cli/csv.hpp"
#include "lde/charspec.hpp"
#include "lde/error.hpp"
#include "lde/parallel.hpp"

namespace lde::cli {

namespace {

std::vector<double> speed_list(const RunConfig& cfg) {
  std::vector<double> cs = cfg.c;
  if (!cfg.c_range.empty()) {
    double lo = 0, hi = 0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(cfg.c_range);
    if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 || !(lo < hi)) {
      throw InvalidArgument("--c-range expects lo:hi:n with lo < hi and n >= 2");
    }
    for (long k = 0; k < n; ++k) cs.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return cs;
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

int cmd_speeds(const RunConfig& cfg, const Model& model) {
  const std::size_t workers = worker_count(cfg);
  const ClassifyOptions copts = classify_options(cfg);
  const bool cm = cfg.bisect == "cm" || cfg.bisect == "both";
  const bool cf = cfg.bisect == "cf" || cfg.bisect == "both";
  BisectionOptions bopts;
  bopts.lo = cfg.bracket_lo;
  bopts.hi = cfg.bracket_hi;
  bopts.width = cfg.width;
  bopts.prescan_points = cfg.prescan;
  bopts.workers = workers;

  const LinearCoeffs lin{model.grad0, model.kappa};
  Output out(cfg.out);
  CsvWriter csv(out.stream(), config_json(cfg, model), {"quantity", "c", "value", "note"});
  csv.row({"c_lin", "", fmt(critical_speed(lin)), ""});
  if (model.beta) {
    csv.row({"c_beta", "", fmt(critical_speed({*model.beta, model.kappa})), ""});
  } else {
    csv.row({"c_beta", "", "", "model has no beta"});
  }
  csv.row({"b_lin", "", fmt(stability_threshold(lin)), ""});
  for (double c : speed_list(cfg)) {
    csv.row({"lambda_u", fmt(c), fmt(unstable_root_at_one(c, model.grad1, model.kappa)), ""});
    try {
      const DominantRoot d = dominant_root_at_zero(c, model.grad0, model.kappa);
      csv.row({"lambda_d", fmt(c), fmt(d.lambda), d.double_root ? "double root" : ""});
    } catch (const NoRealRootsError&) {
      csv.row({"lambda_d", fmt(c), "", "no real roots (oscillatory tail)"});
    }
  }
  auto emit = [&](const char* name, const BisectionResult& r) {
    const std::string note = r.note.empty() ? "" : r.note;
    csv.row({std::string(name) + "_lo", "", fmt(r.lo), note});
    csv.row({std::string(name) + "_hi", "", fmt(r.hi), r.converged ? "converged" : "not converged"});
  };
  if (cm) emit("c_m", find_c_m(model, bopts, copts));
  if (cf) emit("c_f", find_c_f(model, bopts, copts));
  return 0;
}

int cmd_front(const RunConfig& cfg, const Model& model) {
  if (cfg.c.size() != 1) throw InvalidArgument("front: give exactly one speed with --c");
  if (!(cfg.resolution > 0.0)) throw InvalidArgument("front: --resolution must be positive");
  const Shot shot = shoot(model, cfg.c[0], classify_options(cfg));
  const DenseTrajectory& t = shot.trajectory;
  const double lo = cfg.x_min.value_or(-5.0 * model.history_length());
  const double hi = std::min(cfg.x_max.value_or(t.x_end()), t.x_end());
  if (!(lo < hi)) throw InvalidArgument("front: empty output range");
  Output out(cfg.out);
  CsvWriter csv(out.stream(), config_json(cfg, model), {"x", "phi", "dphi"});
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / cfg.resolution + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    const double x = lo + cfg.resolution * static_cast<double>(k);
    csv.row({fmt(x), fmt(t.value(x)), fmt(t.slope(x))});
  }
  csv.comment("classification: " + to_string(shot.classification.kind));
  return 0;
}

int cmd_scan(const RunConfig& cfg, const Model& model) {
  const auto cs = speed_list(cfg);
  if (cs.empty()) throw InvalidArgument("scan: give speeds with --c or --c-range");
  const auto rows = scan_speeds(model, cs, classify_options(cfg), worker_count(cfg));
  Output out(cfg.out);
  CsvWriter csv(out.stream(), config_json(cfg, model),
                {"c", "kind", "first_crossing", "min_value", "max_value", "entry_x", "x_end", "final_value"});
  for (const auto& r : rows) {
    const Classification& k = r.classification;
    csv.row({fmt(r.c), to_string(k.kind), fmt(k.first_crossing), fmt(k.min_value), fmt(k.max_value),
             fmt(k.entry_x), fmt(k.x_end), fmt(k.final_value)});
  }
  return 0;
}

LatticeOptions lattice_options(const RunConfig& cfg) {
  LatticeOptions lo;
  lo.initial = initial_kind_from_string(cfg.initial);
  lo.front_c = cfg.c.empty() ? 0.0 : cfg.c[0];
  lo.t_end = cfg.t_end;
  lo.dt = cfg.dt;
  lo.snapshot_every = cfg.snapshot;
  lo.sites = cfg.sites;
  lo.left_boundary = cfg.left_boundary;
  lo.m_blow = cfg.m_blow;
  lo.front = classify_options(cfg);
  return lo;
}

int cmd_simulate(const RunConfig& cfg, const Model& model) {
  const LatticeRun run = simulate(model, lattice_options(cfg));
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
  Output out(cfg.out);
  CsvWriter csv(out.stream(), config_json(cfg, model), {"t", "p", "u"});
  for (const auto& snap : run.snapshots) {
    for (std::size_t p = 0; p < snap.u.size(); ++p) {
      csv.row({fmt(snap.t), std::to_string(static_cast<long long>(p) - static_cast<long long>(run.origin)),
               fmt(snap.u[p])});
    }
  }
  try {
    const SpeedFit fit = measure_speed(run, cfg.theta);
    std::ostringstream os;
    os << "speed: " << fmt(fit.speed) << ", residual: " << fmt(fit.residual) << ", points: " << fit.points;
    csv.comment(os.str());
    std::cerr << os.str() << '\n';
  } catch (const ComputationError& e) {
    csv.comment(std::string("speed: unavailable (") + e.what() + ")");
    std::cerr << "warning: " << e.what() << '\n';
  }
  return 0;
}

int cmd_check(const RunConfig& cfg, const Model& model) {
  const HypothesisReport rep = check_hypotheses(model, check_options(cfg));
  Output out(cfg.out);
  std::ostream& text = (cfg.out.empty() || cfg.out == "-") ? std::cerr : std::cout;
  text << "model: " << model.name << "\n";
  text << "grid: " << rep.n_grid << " points per axis, seed " << cfg.seed << "\n";
  if (rep.suggested_beta) {
    text << "suggested beta:";
    for (double b : *rep.suggested_beta) text << ' ' << fmt(b);
    text << "\n";
  }
  for (const auto& c : rep.clauses) {
    text << c.name << ": " << to_string(c.status) << " (worst margin " << fmt(c.worst_margin) << ", " << c.samples
         << " samples)";
    if (!c.note.empty()) text << " - " << c.note;
    text << "\n";
  }
  if (rep.g3) {
    text << "G3 constants: M0 = " << fmt(rep.g3->M0) << ", eta = " << fmt(rep.g3->eta) << ", M = " << fmt(rep.g3->M)
         << ", slope bound = " << fmt(rep.g3->slope_bound) << "\n";
  }
  CsvWriter csv(out.stream(), config_json(cfg, model),
                {"clause", "status", "worst_margin", "samples", "witness_s", "witness_value", "inequality", "note"});
  for (const auto& c : rep.clauses) {
    std::string s, v, ineq;
    if (c.witness) {
      for (std::size_t i = 0; i < c.witness->s.size(); ++i) s += (i ? " " : "") + fmt(c.witness->s[i]);
      v = fmt(c.witness->value);
      ineq = c.witness->inequality;
    }
    csv.row({c.name, to_string(c.status), fmt(c.worst_margin), std::to_string(c.samples), s, v, ineq, c.note});
  }
  return 0;
}

int cmd_poincare(const RunConfig& cfg, const Model& model) {
  if (cfg.c.size() != 1) throw InvalidArgument("poincare: give exactly one speed with --c");
  if (cfg.iterations < 1) throw InvalidArgument("poincare: --iterations must be at least 1");
  const double c = cfg.c[0];
  const double r = model.history_length();
  const auto eps = model.params.find("eps");
  const double level = cfg.level.value_or(eps != model.params.end() ? 2.0 * eps->second : 0.02);
  IntegrateOptions integ;
  integ.step = cfg.step;
  integ.m_blow = cfg.m_blow;

  const Shot shot = shoot(model, c, classify_options(cfg));
  const auto hit = section_hit(shot.trajectory, level, r);
  if (!hit) throw ComputationError("poincare: the shot trajectory never enters the section");
  SectionState state{shot.trajectory.window(*hit), *hit};

  Output out(cfg.out);
  const nlohmann::json conf = config_json(cfg, model);
  CsvWriter csv(out.stream(), conf, {"iteration", "section_x", "tau", "distance", "fixed_point", "half_period"});
  std::optional<Output> states_file;
  std::optional<CsvWriter> states;
  if (!cfg.states_out.empty()) {
    states_file.emplace(cfg.states_out);
    states.emplace(states_file->stream(), conf, std::vector<std::string>{"iteration", "s", "psi"});
  }
  auto dump_state = [&](int it, const History& psi) {
    if (!states) return;
    for (int k = 0; k <= 200; ++k) {
      const double s = -r + r * k / 200.0;
      states->row({std::to_string(it), fmt(s), fmt(psi.value(s))});
    }
  };
  dump_state(0, state.psi);
  for (int it = 1; it <= cfg.iterations; ++it) {
    const PoincareReturn pr = poincare_return(model, c, level, state, cfg.horizon, integ);
    csv.row({std::to_string(it), fmt(state.x), fmt(pr.tau), fmt(pr.distance), pr.fixed_point ? "1" : "0",
             fmt(pr.half_period)});
    state = pr.next;
    dump_state(it, state.psi);
  }
  return 0;
}

int dispatch(const RunConfig& cfg) {
  if (cfg.subcommand == "experiment") {
    const int failed = run_experiment(cfg, std::cerr);
    return failed == 0 ? 0 : 1;
  }
  const Model model = load_model(cfg);
  validate(cfg, model);
  if (cfg.subcommand == "speeds") return cmd_speeds(cfg, model);
  if (cfg.subcommand == "front") return cmd_front(cfg, model);
  if (cfg.subcommand == "scan") return cmd_scan(cfg, model);
  if (cfg.subcommand == "simulate") return cmd_simulate(cfg, model);
  if (cfg.subcommand == "check") return cmd_check(cfg, model);
  if (cfg.subcommand == "poincare") return cmd_poincare(cfg, model);
  throw InvalidArgument("unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace

Params parse_params(const std::vector<std::string>& items) {
  Params p;
  for (const auto& item : items) {
    std::istringstream all(item);
    std::string kv;
    while (std::getline(all, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--param expects key=value, got '" + kv + "'");
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string key = trim(kv.substr(0, eq));
      const std::string val = trim(kv.substr(eq + 1));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (key.empty() || used != val.size() || val.empty()) {
        throw InvalidArgument("--param: cannot read '" + kv + "' as key=number");
      }
      p[key] = v;
    }
  }
  return p;
}

Model load_model(const RunConfig& cfg) {
  if (!cfg.model_file.empty()) {
    if (!cfg.params.empty()) throw InvalidArgument("--param cannot be combined with --model-file");
    return load_model_file(cfg.model_file);
  }
  return catalog(cfg.model, parse_params(cfg.params));
}

ClassifyOptions classify_options(const RunConfig& cfg) {
  ClassifyOptions o;
  o.eps0 = cfg.eps0;
  o.dwell = cfg.dwell;
  o.horizon = cfg.horizon;
  o.delta = cfg.delta;
  o.branch = cfg.branch;
  o.integrate.step = cfg.step;
  o.integrate.m_blow = cfg.m_blow;
  return o;
}

CheckOptions check_options(const RunConfig& cfg) {
  CheckOptions o;
  o.n_grid = cfg.n_grid;
  o.seed = cfg.seed;
  o.box_top = cfg.box_top;
  return o;
}

std::size_t worker_count(const RunConfig& cfg) { return cfg.workers > 0 ? cfg.workers : default_workers(); }

void validate(const RunConfig& cfg, const Model& model) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
  };
  need(cfg.step >= 0.0, "--step must be nonnegative");
  need(cfg.step == 0.0 || cfg.step <= model.min_delay() / 4.0,
       "--step must not exceed min(kappa)/4 = " + fmt(model.min_delay() / 4.0));
  need(cfg.horizon >= 0.0, "--horizon must be nonnegative");
  need(cfg.eps0 > 0.0, "--eps0 must be positive");
  need(cfg.dwell >= 0.0, "--dwell must be nonnegative");
  need(cfg.delta > 0.0, "--delta must be positive");
  need(cfg.branch == 1 || cfg.branch == -1, "--branch must be +1 or -1");
  need(cfg.m_blow > 1.0, "--m-blow must exceed 1");
  for (double c : cfg.c) need(c > 0.0, "speeds must be positive");
  need(cfg.bisect == "none" || cfg.bisect == "cm" || cfg.bisect == "cf" || cfg.bisect == "both",
       "--bisect must be none, cm, cf or both");
  need(cfg.prescan >= 2, "--prescan must be at least 2");
  need(!cfg.width || *cfg.width > 0.0, "--width must be positive");
  need(cfg.n_grid >= 2, "--grid must be at least 2");
  need(cfg.box_top > 1.0, "--box-top must exceed 1");
  need(cfg.t_end > 0.0 && cfg.dt > 0.0 && cfg.snapshot > 0.0, "--t-end, --dt and --snapshot must be positive");
  need(cfg.theta > 0.0 && cfg.theta < 1.0, "--theta must lie in (0, 1)");
  need(!cfg.left_boundary || *cfg.left_boundary == 0.0 || *cfg.left_boundary == 1.0,
       "--left-boundary must be 0 or 1");
  initial_kind_from_string(cfg.initial);
}

nlohmann::json config_json(const RunConfig& cfg, const Model& model) {
  using nlohmann::json;
  json m;
  m["name"] = model.name;
  m["source"] = cfg.model_file.empty() ? "catalog" : cfg.model_file;
  m["g"] = model.g->describe();
  m["kappa"] = model.kappa;
  m["beta"] = model.beta ? json(*model.beta) : json();
  m["smoothing"] = model.smoothing;
  m["params"] = model.params;

  json o;
  o["step"] = cfg.step;
  o["horizon"] = cfg.horizon;
  o["eps0"] = cfg.eps0;
  o["dwell"] = cfg.dwell;
  o["delta"] = cfg.delta;
  o["branch"] = cfg.branch;
  o["m_blow"] = cfg.m_blow;
  if (cfg.subcommand == "speeds" || cfg.subcommand == "scan" || cfg.subcommand == "front" ||
      cfg.subcommand == "poincare" || cfg.subcommand == "simulate") {
    o["c"] = speed_list(cfg);
  }
  if (cfg.subcommand == "speeds") {
    o["bisect"] = cfg.bisect;
    o["bracket_lo"] = opt_json(cfg.bracket_lo);
    o["bracket_hi"] = opt_json(cfg.bracket_hi);
    o["width"] = opt_json(cfg.width);
    o["prescan"] = cfg.prescan;
  }
  if (cfg.subcommand == "front") {
    o["x_min"] = opt_json(cfg.x_min);
    o["x_max"] = opt_json(cfg.x_max);
    o["resolution"] = cfg.resolution;
  }
  if (cfg.subcommand == "check") {
    o["grid"] = cfg.n_grid;
    o["box_top"] = cfg.box_top;
  }
  if (cfg.subcommand == "simulate") {
    o["initial"] = cfg.initial;
    o["t_end"] = cfg.t_end;
    o["dt"] = cfg.dt;
    o["snapshot"] = cfg.snapshot;
    o["sites"] = cfg.sites;
    o["left_boundary"] = opt_json(cfg.left_boundary);
    o["theta"] = cfg.theta;
  }
  if (cfg.subcommand == "poincare") {
    o["level"] = opt_json(cfg.level);
    o["iterations"] = cfg.iterations;
  }
  if (cfg.subcommand == "experiment") o["experiment"] = cfg.experiment;

  json j;
  j["subcommand"] = cfg.subcommand;
  j["model"] = m;
  j["options"] = o;
  j["seed"] = cfg.seed;
  return j;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Traveling-wave fronts of unidirectional lattice equations"};
  app.require_subcommand(1);

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model,-m", cfg.model, "catalog model name")->capture_default_str();
    sub->add_option("--model-file", cfg.model_file, "model config file");
    sub->add_option("--param,-p", cfg.params, "catalog parameter key=value (repeatable)");
    sub->add_option("--out,-o", cfg.out, "output CSV path, '-' for stdout")->capture_default_str();
    sub->add_option("--workers,-j", cfg.workers, "worker threads (default LDE_WORKERS or all cores)");
    sub->add_option("--seed", cfg.seed, "seed for random sampling")->capture_default_str();
  };
  auto add_integration = [&](CLI::App* sub) {
    sub->add_option("--step", cfg.step, "integration step (0: min kappa / 50)");
    sub->add_option("--horizon", cfg.horizon, "integration horizon (0: 3000 r)");
    sub->add_option("--eps0", cfg.eps0, "radius of the convergence ball")->capture_default_str();
    sub->add_option("--dwell", cfg.dwell, "dwell length (0: 5 r)");
    sub->add_option("--delta", cfg.delta, "tail amplitude")->capture_default_str();
    sub->add_option("--branch", cfg.branch, "unstable-manifold branch, -1 or +1")->capture_default_str();
    sub->add_option("--m-blow", cfg.m_blow, "blow-up threshold")->capture_default_str();
  };

  auto* speeds = app.add_subcommand("speeds", "linear speeds, roots and optional bisections");
  add_model(speeds);
  add_integration(speeds);
  speeds->add_option("--c", cfg.c, "speeds at which to report lambda_u and lambda_d")->delimiter(',');
  speeds->add_option("--c-range", cfg.c_range, "lo:hi:n");
  speeds->add_option("--bisect", cfg.bisect, "none, cm, cf or both")->capture_default_str();
  speeds->add_option("--lo", cfg.bracket_lo, "lower bracket end");
  speeds->add_option("--hi", cfg.bracket_hi, "upper bracket end");
  speeds->add_option("--width", cfg.width, "bisection width");
  speeds->add_option("--prescan", cfg.prescan, "prescan points")->capture_default_str();

  auto* front = app.add_subcommand("front", "shoot one profile and write (x, phi, phi')");
  add_model(front);
  add_integration(front);
  front->add_option("--c", cfg.c, "wave speed")->required()->delimiter(',');
  front->add_option("--x-min", cfg.x_min, "first output x (default -5 r)");
  front->add_option("--x-max", cfg.x_max, "last output x (default end of integration)");
  front->add_option("--resolution", cfg.resolution, "output spacing")->capture_default_str();

  auto* scan = app.add_subcommand("scan", "classify a list of speeds");
  add_model(scan);
  add_integration(scan);
  scan->add_option("--c", cfg.c, "speeds, ascending")->delimiter(',');
  scan->add_option("--c-range", cfg.c_range, "lo:hi:n");

  auto* sim = app.add_subcommand("simulate", "direct lattice simulation");
  add_model(sim);
  add_integration(sim);
  sim->add_option("--initial", cfg.initial, "front-profile, step or bump")->capture_default_str();
  sim->add_option("--c", cfg.c, "front speed for front-profile data")->delimiter(',');
  sim->add_option("--t-end", cfg.t_end, "final time")->capture_default_str();
  sim->add_option("--dt", cfg.dt, "time step")->capture_default_str();
  sim->add_option("--snapshot", cfg.snapshot, "snapshot interval")->capture_default_str();
  sim->add_option("--sites", cfg.sites, "number of sites (0: automatic)");
  sim->add_option("--left-boundary", cfg.left_boundary, "value of missing left neighbours, 0 or 1");
  sim->add_option("--theta", cfg.theta, "level used for the speed fit")->capture_default_str();

  auto* check = app.add_subcommand("check", "numerical hypothesis checks");
  add_model(check);
  check->add_option("--grid", cfg.n_grid, "grid points per axis")->capture_default_str();
  check->add_option("--box-top", cfg.box_top, "upper end of the G2/G3 sampling box")->capture_default_str();

  auto* poin = app.add_subcommand("poincare", "iterate the Poincare return map");
  add_model(poin);
  add_integration(poin);
  poin->add_option("--c", cfg.c, "wave speed")->required()->delimiter(',');
  poin->add_option("--level", cfg.level, "section level (default 2 eps)");
  poin->add_option("--iterations", cfg.iterations, "number of returns")->capture_default_str();
  poin->add_option("--states", cfg.states_out, "CSV of section states");

  auto* exp = app.add_subcommand("experiment", "scripted example pipelines");
  exp->add_option("name", cfg.experiment, "peletier, vanzon, exA, exB1, exB2, exC, continuum")->required();
  exp->add_option("--param,-p", cfg.params, "parameters for exA (tau, eta, alpha, gamma)");
  exp->add_option("--out-dir", cfg.out_dir, "directory for CSVs and summary (default ldefront-<name>)");
  exp->add_option("--workers,-j", cfg.workers, "worker threads");
  exp->add_option("--seed", cfg.seed, "seed for random sampling")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();

  try {
    return dispatch(cfg);
  } catch (const ComputationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lde::cli
