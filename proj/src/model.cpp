#include "lde/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lde/error.hpp"

namespace lde {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

std::vector<double> gradient(const Feedback& g, std::span<const double> s) {
  const std::size_t n = s.size();
  std::vector<Dual> ds(n);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) ds[j] = Dual(s[j], j == k ? 1.0 : 0.0);
    out[k] = g(std::span<const Dual>(ds)).d;
  }
  return out;
}

std::string CnnFeedback::describe() const {
  return "-s0 + " + fmt(a0_) + "*" + f_.name() + "(s0) + " + fmt(a1_) + "*" + f_.name() + "(s1)";
}

std::string UpwindFeedback::describe() const {
  return "-(" + flux_.name() + "(s0) - " + flux_.name() + "(s1))/" + fmt(eps_) + " + " +
         source_.name() + "(s0)";
}

ExprFeedback::ExprFeedback(expr::Expr e, std::size_t arity, double smoothing)
    : e_(std::move(e)), arity_(arity), smoothing_(smoothing) {
  if (e_.max_variable() >= static_cast<int>(arity_)) {
    throw InvalidArgument("expression uses s" + std::to_string(e_.max_variable()) +
                          " but the model has only " + std::to_string(arity_) + " arguments");
  }
  if (smoothing_ < 0.0) throw InvalidArgument("smoothing must be nonnegative");
}

ReducedFeedback::ReducedFeedback(std::shared_ptr<const Feedback> full, std::vector<std::size_t> slot,
                                 std::size_t reduced_arity)
    : full_(std::move(full)), slot_(std::move(slot)), reduced_arity_(reduced_arity) {
  if (!full_ || full_->arity() != slot_.size()) {
    throw InvalidArgument("ReducedFeedback: slot map must cover every argument of g");
  }
  for (std::size_t k : slot_) {
    if (k >= reduced_arity_) throw InvalidArgument("ReducedFeedback: slot out of range");
  }
}

double ReducedFeedback::operator()(std::span<const double> s) const {
  std::vector<double> full(slot_.size());
  for (std::size_t k = 0; k < slot_.size(); ++k) full[k] = s[slot_[k]];
  return (*full_)(std::span<const double>(full));
}

Dual ReducedFeedback::operator()(std::span<const Dual> s) const {
  std::vector<Dual> full(slot_.size());
  for (std::size_t k = 0; k < slot_.size(); ++k) full[k] = s[slot_[k]];
  return (*full_)(std::span<const Dual>(full));
}

std::string ReducedFeedback::describe() const {
  std::string out = full_->describe() + " with arguments (";
  for (std::size_t k = 0; k < slot_.size(); ++k) {
    if (k) out += ", ";
    out += "s" + std::to_string(slot_[k]);
  }
  return out + ")";
}

double Model::history_length() const { return *std::max_element(kappa.begin(), kappa.end()); }

double Model::min_delay() const { return *std::min_element(kappa.begin(), kappa.end()); }

Model make_model(std::string name, std::vector<double> kappa, std::shared_ptr<const Feedback> g,
                 std::optional<std::vector<double>> beta, double smoothing) {
  Model m;
  m.name = std::move(name);
  m.kappa = std::move(kappa);
  m.g = std::move(g);
  m.beta = std::move(beta);
  m.smoothing = smoothing;
  if (!m.g) throw InvalidArgument("model '" + m.name + "' has no feedback function");
  if (m.kappa.empty()) throw InvalidArgument("model '" + m.name + "' needs at least one delay");
  if (m.g->arity() != m.kappa.size() + 1) {
    throw InvalidArgument("model '" + m.name + "': g takes " + std::to_string(m.g->arity()) +
                          " arguments but there are " + std::to_string(m.kappa.size()) + " delays");
  }
  const std::vector<double> zero(m.kappa.size() + 1, 0.0);
  const std::vector<double> one(m.kappa.size() + 1, 1.0);
  m.grad0 = gradient(*m.g, zero);
  m.grad1 = gradient(*m.g, one);
  validate(m);
  return m;
}

void validate(const Model& m) {
  const std::size_t n = m.kappa.size();
  if (n == 0) throw InvalidArgument("model '" + m.name + "' needs at least one delay");
  for (double k : m.kappa) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw InvalidArgument("model '" + m.name + "': delays must be positive, got " + fmt(k));
    }
  }
  if (!m.g || m.g->arity() != n + 1) {
    throw InvalidArgument("model '" + m.name + "': feedback arity must be N+1");
  }
  if (m.grad0.size() != n + 1 || m.grad1.size() != n + 1) {
    throw InvalidArgument("model '" + m.name + "': gradients must have length N+1");
  }
  if (m.beta && m.beta->size() != n + 1) {
    throw InvalidArgument("model '" + m.name + "': beta must have length N+1");
  }
  if (m.smoothing < 0.0) throw InvalidArgument("model '" + m.name + "': negative smoothing");

  // Gradients against central differences.
  constexpr double h = 1e-6;
  for (double base : {0.0, 1.0}) {
    const std::vector<double>& grad = base == 0.0 ? m.grad0 : m.grad1;
    std::vector<double> s(n + 1, base);
    for (std::size_t k = 0; k <= n; ++k) {
      s[k] = base + h;
      const double up = m(s);
      s[k] = base - h;
      const double down = m(s);
      s[k] = base;
      const double fd = (up - down) / (2.0 * h);
      if (!std::isfinite(grad[k]) ||
          std::abs(fd - grad[k]) > 1e-6 * std::max(1.0, std::abs(grad[k]))) {
        throw InvalidArgument("model '" + m.name + "': derivative d g/d s" + std::to_string(k) +
                              " at " + fmt(base) + " is " + fmt(grad[k]) +
                              " but central difference gives " + fmt(fd) +
                              " (g is not C^1 there; set smoothing)");
      }
    }
  }
}

std::vector<double> separable_beta(const ScalarFn& f, double margin) {
  constexpr double step = 1e-5;
  const int n = static_cast<int>(std::lround(1.0 / step));
  double best = f.slope(0.0);
  int best_k = 0;
  for (int k = 1; k < n; ++k) {
    const double t = k * step;
    const double q = f(t) / t;
    if (q > best) {
      best = q;
      best_k = k;
    }
  }
  if (best_k > 0) {
    // Golden-section refinement on the neighbouring grid cells.
    double a = std::max((best_k - 1) * step, 0.5 * step);
    double b = std::min((best_k + 1) * step, 1.0 - 0.5 * step);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    auto q = [&](double t) { return f(t) / t; };
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = q(x1), f2 = q(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + r * (b - a);
        f2 = q(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - r * (b - a);
        f1 = q(x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  return {-1.0, best * (1.0 + margin)};
}

GeometrySpec GeometrySpec::from_neighbors(std::vector<double> xi, const std::vector<int>& site,
                                          const std::vector<std::vector<int>>& neighbors) {
  GeometrySpec g;
  g.dim = static_cast<int>(site.size());
  g.xi = std::move(xi);
  for (const auto& q : neighbors) {
    if (q.size() != site.size()) throw InvalidArgument("neighbour dimension mismatch");
    std::vector<int> off(site.size());
    for (std::size_t d = 0; d < site.size(); ++d) off[d] = site[d] - q[d];
    g.offsets.push_back(std::move(off));
  }
  return g;
}

ReducedDelays delays_from_geometry(const GeometrySpec& geom) {
  if (geom.dim < 1) throw InvalidArgument("geometry dimension must be positive");
  if (geom.xi.size() != static_cast<std::size_t>(geom.dim)) {
    throw InvalidArgument("xi must have dimension " + std::to_string(geom.dim));
  }
  const double norm = std::sqrt(std::inner_product(geom.xi.begin(), geom.xi.end(), geom.xi.begin(), 0.0));
  if (std::abs(norm - 1.0) > 1e-12) {
    throw InvalidArgument("xi must be a unit vector (|xi| = " + fmt(norm) + ")");
  }
  if (geom.offsets.empty()) throw InvalidArgument("geometry has no neighbours");

  ReducedDelays out;
  constexpr double tol = 1e-12;
  for (std::size_t i = 0; i < geom.offsets.size(); ++i) {
    const auto& off = geom.offsets[i];
    if (off.size() != geom.xi.size()) {
      throw InvalidArgument("offset " + std::to_string(i) + " has the wrong dimension");
    }
    double k = 0.0;
    for (std::size_t d = 0; d < off.size(); ++d) k += geom.xi[d] * off[d];
    if (k < -tol) {
      throw InvalidArgument("geometry is not unidirectional: xi . offset " + std::to_string(i) +
                            " = " + fmt(k) + " < 0");
    }
    out.raw.push_back(std::abs(k) <= tol ? 0.0 : k);
  }

  std::vector<double> distinct;
  for (double k : out.raw) {
    if (k == 0.0) continue;
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](double d) { return std::abs(d - k) <= tol * std::max(1.0, k); });
    if (!seen) distinct.push_back(k);
  }
  if (distinct.empty()) {
    throw InvalidArgument("degenerate geometry: every neighbour lies on the front hyperplane (N = 0)");
  }
  std::sort(distinct.begin(), distinct.end());
  out.kappa = distinct;
  out.multiplicity.assign(distinct.size(), 0);
  for (double k : out.raw) {
    if (k == 0.0) {
      out.slot.push_back(0);
      continue;
    }
    for (std::size_t j = 0; j < distinct.size(); ++j) {
      if (std::abs(distinct[j] - k) <= tol * std::max(1.0, k)) {
        out.slot.push_back(j + 1);
        ++out.multiplicity[j];
        break;
      }
    }
  }
  return out;
}

Model model_from_geometry(std::string name, const GeometrySpec& geom,
                          std::shared_ptr<const Feedback> full_g,
                          std::optional<std::vector<double>> beta) {
  const ReducedDelays rd = delays_from_geometry(geom);
  if (!full_g || full_g->arity() != geom.offsets.size() + 1) {
    throw InvalidArgument("g must take one argument per neighbour plus the site itself");
  }
  std::vector<std::size_t> slot{0};
  slot.insert(slot.end(), rd.slot.begin(), rd.slot.end());
  auto reduced = std::make_shared<ReducedFeedback>(std::move(full_g), std::move(slot), rd.kappa.size() + 1);
  return make_model(std::move(name), rd.kappa, std::move(reduced), std::move(beta));
}

ScalarFn saturating_exponential(double slope0) {
  if (!(slope0 > 1.0)) throw InvalidArgument("saturating map needs f'(0) > 1");
  // k / (1 - exp(-k)) is increasing from 1 (k -> 0); bracket and bisect.
  auto q = [](double k) { return k / -std::expm1(-k); };
  double lo = 0.0, hi = 1.0;
  while (q(hi) < slope0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (q(mid) < slope0 ? lo : hi) = mid;
  }
  const double k = 0.5 * (lo + hi);
  const double denom = -std::expm1(-k);
  return ScalarFn("satexp[" + fmt(slope0) + "]", [k, denom](double s) {
    return ValueSlope{-std::expm1(-k * s) / denom, k * std::exp(-k * s) / denom};
  });
}

}  // namespace lde
