#include "lde/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "lde/error.hpp"

namespace lde {

namespace {

constexpr double kMarginal = 1e-12;

// Per-axis resolution so that m^dims stays under the cap.
std::size_t axis_points(int n_grid, std::size_t dims, std::size_t cap) {
  std::size_t m = static_cast<std::size_t>(std::max(1, n_grid));
  while (m > 2 && std::pow(static_cast<double>(m), static_cast<double>(dims)) > static_cast<double>(cap)) --m;
  return m;
}

void for_each_index(std::size_t dims, std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(dims, 0);
  while (true) {
    fn(idx);
    std::size_t d = 0;
    while (d < dims && ++idx[d] == m) idx[d++] = 0;
    if (d == dims) return;
  }
}

// Tracks the smallest margin of a strict inequality "margin > 0".
struct MarginTracker {
  double worst = std::numeric_limits<double>::infinity();
  std::vector<double> worst_s;
  std::optional<Witness> witness;
  std::size_t samples = 0;

  void add(const std::vector<double>& s, double margin, double value, const char* inequality) {
    ++samples;
    if (margin < worst) {
      worst = margin;
      worst_s = s;
    }
    if (!(margin > 0.0) && !witness) witness = Witness{s, value, inequality};
  }

  ClauseReport report(std::string name) const {
    ClauseReport r;
    r.name = std::move(name);
    r.samples = samples;
    r.worst_margin = worst;
    if (witness) {
      r.status = Status::Violated;
      r.witness = witness;
    } else if (worst < kMarginal) {
      r.status = Status::Marginal;
      r.note = "strict inequality holds with margin below 1e-12";
    } else {
      r.status = Status::Verified;
    }
    return r;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

ClauseReport check_g11(const Model& m, const CheckOptions& opts) {
  const std::size_t n = m.kappa.size() + 1;
  MarginTracker t;
  for (double a : {0.0, 1.0}) {
    const std::vector<double> s(n, a);
    const double v = m(s);
    ++t.samples;
    if (v != 0.0 && !t.witness) t.witness = Witness{s, v, "g(a,...,a) = 0 at a = 0 and a = 1"};
  }
  const int k_max = 100 * std::max(1, opts.n_grid);
  int sign = 0;
  for (int k = 1; k <= k_max; ++k) {
    const double a = static_cast<double>(k) / (k_max + 1);
    const std::vector<double> s(n, a);
    const double v = m(s);
    const int sg = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (sign == 0) sign = sg;
    const bool bad = sg == 0 || sg != sign;
    t.add(s, bad ? 0.0 : std::abs(v), v, "g(a,...,a) != 0 for a in (0,1)");
  }
  return t.report("G1.1");
}

ClauseReport check_g12(const Model& m) {
  MarginTracker t;
  const std::size_t n = m.kappa.size() + 1;
  for (double a : {0.0, 1.0}) {
    const std::vector<double>& grad = a == 0.0 ? m.grad0 : m.grad1;
    const std::vector<double> s(n, a);
    t.add(s, -grad[0], grad[0], "dg/ds0 < 0 at 0 and 1");
    for (std::size_t i = 1; i < n; ++i) {
      ++t.samples;
      if (grad[i] < 0.0 && !t.witness) t.witness = Witness{s, grad[i], "dg/ds_i >= 0 at 0 and 1"};
    }
    const double sum = std::accumulate(grad.begin(), grad.end(), 0.0);
    if (a == 0.0) {
      t.add(s, sum, sum, "sum of dg/ds_i at 0 > 0");
    } else {
      t.add(s, -sum, sum, "sum of dg/ds_i at 1 < 0");
    }
  }
  return t.report("G1.2");
}

ClauseReport check_g13(const Model& m, const CheckOptions& opts, const std::vector<double>* beta) {
  const std::size_t n = m.kappa.size() + 1;
  MarginTracker t;
  if (beta) {
    if (beta->size() != n) throw InvalidArgument("beta must have length N+1");
    const double sum = std::accumulate(beta->begin(), beta->end(), 0.0);
    bool ok = (*beta)[0] < 0.0 && sum > 0.0;
    for (std::size_t i = 1; i < n; ++i) ok = ok && (*beta)[i] > 0.0;
    if (!ok) {
      ClauseReport r;
      r.name = "G1.3";
      r.status = Status::Violated;
      r.witness = Witness{*beta, sum, "beta_0 < 0 < beta_i and sum beta > 0"};
      r.note = "beta itself is not admissible";
      return r;
    }
  }
  auto sample = [&](const std::vector<double>& s) {
    const double g = m(s);
    double margin = g;
    double value = g;
    const char* what = "g(s) > 0";
    if (beta) {
      const double upper = dot(*beta, s) - g;
      if (upper < margin) {
        margin = upper;
        value = upper;
        what = "g(s) < beta . s";
      }
    }
    t.add(s, margin, value, what);
  };

  const std::size_t mpts = axis_points(opts.n_grid, n, opts.max_grid_points);
  std::vector<double> s(n);
  for_each_index(n, mpts, [&](const std::vector<std::size_t>& idx) {
    for (std::size_t d = 0; d < n; ++d) s[d] = static_cast<double>(idx[d] + 1) / static_cast<double>(mpts + 1);
    for (std::size_t d = 1; d < n; ++d) {
      if (!(s[0] < s[d])) return;
    }
    sample(s);
  });
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double grid_total = std::pow(static_cast<double>(mpts), static_cast<double>(n));
  const auto n_random = static_cast<std::size_t>(10.0 * grid_total);
  for (std::size_t k = 0; k < n_random; ++k) {
    for (auto& v : s) v = u(rng);
    const auto lo = std::min_element(s.begin(), s.end());
    std::iter_swap(s.begin(), lo);
    bool strict = s[0] > 0.0;
    for (std::size_t d = 1; d < n; ++d) strict = strict && s[0] < s[d] && s[d] < 1.0;
    if (strict) sample(s);
  }
  ClauseReport r = t.report("G1.3");
  if (!beta) r.note = "lower inequality only";
  return r;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Verified: return "verified-on-grid";
    case Status::Marginal: return "marginal";
    case Status::Violated: return "violated";
    case Status::Inapplicable: return "inapplicable";
  }
  return "?";
}

const ClauseReport& HypothesisReport::clause(const std::string& name) const {
  for (const auto& c : clauses) {
    if (c.name == name) return c;
  }
  throw InvalidArgument("no clause named " + name);
}

std::vector<ClauseReport> check_G1(const Model& model, const CheckOptions& opts,
                                   const std::optional<std::vector<double>>& beta) {
  std::vector<ClauseReport> out{check_g11(model, opts), check_g12(model)};
  const std::optional<std::vector<double>>& b = beta ? beta : model.beta;
  if (b) {
    out.push_back(check_g13(model, opts, &*b));
  } else {
    ClauseReport r;
    r.name = "G1.3";
    r.status = Status::Inapplicable;
    r.note = "no beta supplied";
    out.push_back(r);
  }
  return out;
}

ClauseReport check_G13_lower(const Model& model, const CheckOptions& opts) {
  ClauseReport r = check_g13(model, opts, nullptr);
  r.name = "G1.3-lower";
  return r;
}

ClauseReport check_G2(const Model& model, const CheckOptions& opts) {
  const std::size_t n = model.kappa.size() + 1;
  if (!(opts.box_top > 1.0)) throw InvalidArgument("check_G2: box_top must exceed 1");
  MarginTracker t;
  auto sample = [&](const std::vector<double>& s) {
    const double g = model(s);
    t.add(s, -g, g, "g(s) < 0 when 1 < min s_i and s0 = max s_i");
  };
  const double span = opts.box_top - 1.0;
  const std::size_t mpts = axis_points(opts.n_grid, n, opts.max_grid_points);
  std::vector<double> s(n);
  for_each_index(n, mpts, [&](const std::vector<std::size_t>& idx) {
    for (std::size_t d = 0; d < n; ++d) s[d] = 1.0 + span * static_cast<double>(idx[d] + 1) / static_cast<double>(mpts);
    for (std::size_t d = 1; d < n; ++d) {
      if (s[d] > s[0]) return;
    }
    sample(s);
  });
  std::mt19937_64 rng(opts.seed + 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n_random = static_cast<std::size_t>(10.0 * std::pow(static_cast<double>(mpts), static_cast<double>(n)));
  for (std::size_t k = 0; k < n_random; ++k) {
    s[0] = 1.0 + span * u(rng);
    if (s[0] <= 1.0) continue;
    for (std::size_t d = 1; d < n; ++d) s[d] = 1.0 + (s[0] - 1.0) * u(rng);
    bool ok = true;
    for (std::size_t d = 1; d < n; ++d) ok = ok && s[d] > 1.0;
    if (ok) sample(s);
  }
  return t.report("G2");
}

ClauseReport check_G3(const Model& model, const CheckOptions& opts, G3Constants* constants) {
  const std::size_t n = model.kappa.size() + 1;
  static const double kM0[] = {1.0, 2.0, 5.0, 10.0, 20.0};
  static const double kScale[] = {1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0};
  const std::size_t mpts = axis_points(opts.n_grid, n - 1, opts.max_grid_points / 18);

  ClauseReport r;
  r.name = "G3";
  double best_eta = 2.0, best_m0 = 0.0;
  Witness worst_witness;
  double worst_q = -1.0;
  std::mt19937_64 rng(opts.seed + 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double m0 : kM0) {
    double sup_q = 0.0;
    std::vector<double> s(n), arg;
    auto sample = [&]() {
      const double q = std::abs(model(s) + s[0]) / std::abs(s[0]);
      ++r.samples;
      if (q > sup_q || !std::isfinite(q)) {
        sup_q = std::isfinite(q) ? q : std::numeric_limits<double>::infinity();
        arg = s;
      }
    };
    for (double scale : kScale) {
      for (double sign : {-1.0, 1.0}) {
        const double a = sign * m0 * scale;
        s[0] = a;
        if (n == 1) {
          sample();
          continue;
        }
        for_each_index(n - 1, mpts, [&](const std::vector<std::size_t>& idx) {
          for (std::size_t d = 1; d < n; ++d) {
            s[d] = std::abs(a) * (-1.0 + 2.0 * static_cast<double>(idx[d - 1]) / static_cast<double>(mpts - 1));
          }
          sample();
        });
        for (std::size_t k = 0; k < 10 * mpts; ++k) {
          for (std::size_t d = 1; d < n; ++d) s[d] = std::abs(a) * u(rng);
          sample();
        }
      }
    }
    // Smallest admissible eta on the grid 0.1, ..., 0.9.
    const double eta = std::ceil(std::max(sup_q, 1e-300) * 10.0 - 1e-9) / 10.0;
    if (eta <= 0.9 + 1e-12 && eta < best_eta) {
      best_eta = std::max(eta, 0.1);
      best_m0 = m0;
    }
    if (sup_q > worst_q || m0 == kM0[std::size(kM0) - 1]) {
      worst_q = sup_q;
      worst_witness = Witness{arg, sup_q, "|g(s) + s0| / |s0| <= eta < 1 when |s0| = max |s_i| >= M0"};
    }
  }
  if (best_eta <= 0.9 + 1e-12) {
    r.status = Status::Verified;
    r.worst_margin = 1.0 - best_eta;
    G3Constants k{best_m0, best_eta, std::max(best_m0, 1.0), (1.0 - best_eta) * best_m0};
    std::ostringstream os;
    os << "M0 = " << k.M0 << ", eta = " << k.eta << ", M = " << k.M;
    if (best_eta <= 0.1 + 1e-12) os << " (eta at the grid floor 0.1)";
    r.note = os.str();
    if (constants) *constants = k;
  } else {
    r.status = Status::Violated;
    r.worst_margin = 1.0 - worst_q;
    r.witness = worst_witness;
    r.note = "no (M0, eta) on the grid works; features relying on a priori bounds are disabled";
  }
  return r;
}

std::optional<std::vector<double>> suggest_beta(const Model& model) {
  if (!model.separable_f) return std::nullopt;
  return separable_beta(*model.separable_f, 1e-3);
}

HypothesisReport check_hypotheses(const Model& model, const CheckOptions& opts) {
  HypothesisReport rep;
  rep.n_grid = opts.n_grid;
  rep.suggested_beta = suggest_beta(model);
  const auto beta = model.beta ? model.beta : rep.suggested_beta;
  rep.clauses = check_G1(model, opts, beta);
  rep.clauses.push_back(check_G2(model, opts));
  G3Constants k;
  rep.clauses.push_back(check_G3(model, opts, &k));
  if (rep.clauses.back().status == Status::Verified) rep.g3 = k;
  return rep;
}

}  // namespace lde
