#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lde/error.hpp"
#include "lde/model.hpp"

namespace lde {

namespace {

class ParamReader {
 public:
  ParamReader(std::string_view model, const Params& given) : model_(model), given_(given) {}

  double get(const std::string& key, double fallback) {
    known_.insert(key);
    auto it = given_.find(key);
    const double v = it == given_.end() ? fallback : it->second;
    resolved_[key] = v;
    return v;
  }

  void require(bool ok, const std::string& what) const {
    if (!ok) throw InvalidArgument(std::string(model_) + ": " + what);
  }

  // Rejects parameters the entry does not understand.
  Params finish() const {
    for (const auto& [k, v] : given_) {
      if (!known_.count(k)) {
        std::string list;
        for (const auto& n : known_) list += (list.empty() ? "" : ", ") + n;
        throw InvalidArgument(std::string(model_) + ": unknown parameter '" + k + "'" +
                              (list.empty() ? " (takes none)" : " (expected one of: " + list + ")"));
      }
    }
    return resolved_;
  }

 private:
  std::string_view model_;
  const Params& given_;
  std::set<std::string> known_;
  Params resolved_;
};

std::string tag(std::string_view base, const Params& p) {
  std::ostringstream os;
  os.precision(10);
  os << base;
  if (!p.empty()) {
    os << '(';
    bool first = true;
    for (const auto& [k, v] : p) {
      os << (first ? "" : ",") << k << '=' << v;
      first = false;
    }
    os << ')';
  }
  return os.str();
}

Model separable(std::string name, ScalarFn f, std::optional<std::vector<double>> beta, double eps,
                Params params) {
  if (!beta) beta = separable_beta(f);
  auto g = std::make_shared<SeparableFeedback>(f);
  Model m = make_model(std::move(name), {1.0}, g, beta, eps);
  m.separable_f = std::move(f);
  m.params = std::move(params);
  return m;
}

Model vanzon(ParamReader& pr) {
  Params p = pr.finish();
  ScalarFn f("2s-s^2", [](double s) { return ValueSlope{2.0 * s - s * s, 2.0 - 2.0 * s}; });
  return separable("vanzon", std::move(f), std::vector<double>{-1.0, 2.0}, 0.0, std::move(p));
}

Model peletier(ParamReader& pr) {
  const double eps = pr.get("eps", 0.01);
  pr.require(eps > 0.0 && eps < 0.5, "eps must lie in (0, 1/2)");
  Params p = pr.finish();
  ScalarFn f = make_scalar_fn("min(2s,1)", PiecewiseBlend({{0.0, 2.0}, {1.0, 0.0}}, {centered_window(0.5, eps)}));
  return separable(tag("peletier", p), std::move(f), std::nullopt, eps, std::move(p));
}

Model cnn(ParamReader& pr) {
  const double a0 = pr.get("a0", 0.5);
  const double a1 = pr.get("a1", 1.0);
  const double k = pr.get("k", 2.0);
  const double eps = pr.get("eps", 0.01);
  pr.require(a0 > 0.0 && a1 > 0.0, "a0 and a1 must be positive");
  pr.require(k > 1.0, "k must exceed 1 so that 1/k lies in (0,1)");
  pr.require(eps > 0.0 && eps < 0.5, "eps must lie in (0, 1/2)");
  pr.require(a0 * k < a0 + a1, "need a0 f'(0) < 1, i.e. a0 k < a0 + a1");
  Params p = pr.finish();
  const double sum = a0 + a1;
  ScalarFn f = make_scalar_fn("cnnf", PiecewiseBlend({{0.0, k / sum}, {1.0 / sum, 0.0}},
                                                     {centered_window(1.0 / k, eps)}));
  auto g = std::make_shared<CnnFeedback>(a0, a1, f);
  Model m = make_model(tag("cnn", p), {1.0}, g, std::nullopt, eps);
  // f is concave, so g lies below its tangent plane at 0.
  m.beta = std::vector<double>{m.grad0[0], m.grad0[1] * (1.0 + 1e-3)};
  m.params = std::move(p);
  return m;
}

Model ex_b1(ParamReader& pr) {
  const double eps = pr.get("eps", 0.01);
  pr.require(eps > 0.0 && eps < 0.5, "eps must lie in (0, 1/2)");
  Params p = pr.finish();
  ScalarFn f = make_scalar_fn(
      "f_eps", PiecewiseBlend({{-1.0, 0.0}, {0.0, 2.0}, {1.0, 0.0}},
                              {{-2.0 * eps, -eps}, {eps, 2.0 * eps}}));
  return separable(tag("exB1", p), std::move(f), std::nullopt, eps, std::move(p));
}

Model ex_b2(ParamReader& pr) {
  const double alpha = pr.get("alpha", 0.25);
  const double eps = pr.get("eps", 0.01);
  pr.require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  pr.require(eps > 0.0 && eps <= 0.5 * alpha, "eps must lie in (0, alpha/2]");
  Params p = pr.finish();
  ScalarFn f = make_scalar_fn(
      "f_alpha", PiecewiseBlend({{-alpha, 0.0}, {0.0, 2.0}, {1.0, 0.0}},
                                {BlendWindow{-0.5 * alpha - eps, -0.5 * alpha + eps}, centered_window(0.5, eps)}));
  return separable(tag("exB2", p), std::move(f), std::nullopt, eps, std::move(p));
}

Model ex_c(ParamReader& pr) {
  const double eps = pr.get("eps", 0.005);
  pr.require(eps > 0.0 && eps < 0.5, "eps must lie in (0, 1/2)");
  Params p = pr.finish();
  ScalarFn f = make_scalar_fn(
      "f_C", PiecewiseBlend({{0.0, 2.0}, {1.0, 0.0}, {5.0, 0.0}},
                            {{0.5 - eps, 0.5}, {1.5, 1.5 + eps}}));
  return separable(tag("exC", p), std::move(f), std::nullopt, eps, std::move(p));
}

Model ex_a(ParamReader& pr) {
  const double tau = pr.get("tau", 0.1);
  const double eta = pr.get("eta", 1.0);
  const double alpha = pr.get("alpha", 2.0);
  const double gamma = pr.get("gamma", 6.0);
  pr.require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  pr.require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  pr.require(alpha > 1.0, "alpha must exceed 1");
  pr.require(gamma > alpha, "gamma must exceed alpha");
  Params p = pr.finish();
  const ScalarFn f00 = saturating_exponential(alpha);
  const ScalarFn f11 = saturating_exponential(gamma);
  ScalarFn f("f_tau_eta", [=](double s) {
    const ValueSlope r = smoothstep(s, 0.5 * tau, tau);
    const double rho = eta * r.value, drho = eta * r.slope;
    const ValueSlope a = f00.eval(s), b = f11.eval(s);
    return ValueSlope{(1.0 - rho) * a.value + rho * b.value,
                      (1.0 - rho) * a.slope + rho * b.slope + drho * (b.value - a.value)};
  });
  return separable(tag("exA", p), std::move(f), std::nullopt, 0.0, std::move(p));
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"vanzon", "cnn", "peletier", "exB1", "exB2", "exC", "exA"};
}

Model catalog(std::string_view name, const Params& params) {
  ParamReader pr(name, params);
  if (name == "vanzon") return vanzon(pr);
  if (name == "cnn") return cnn(pr);
  if (name == "peletier") return peletier(pr);
  if (name == "exB1") return ex_b1(pr);
  if (name == "exB2") return ex_b2(pr);
  if (name == "exC") return ex_c(pr);
  if (name == "exA") return ex_a(pr);
  std::string list;
  for (const auto& n : catalog_names()) list += (list.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown catalog model '" + std::string(name) + "' (known: " + list + ")");
}

}  // namespace lde
