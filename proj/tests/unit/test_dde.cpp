#include <doctest.h>

#include <cmath>

#include "lde/classify.hpp"
#include "lde/dde.hpp"
#include "lde/error.hpp"
#include "lde/model.hpp"

using namespace lde;

namespace {

// g = -s0 + s1 with delay kappa: c phi' = phi(x) - phi(x - kappa) has the exact
// solution exp(lam x) whenever c lam = 1 - exp(-lam kappa).
struct LinearCase {
  Model model;
  double lam;
  double c;
};

LinearCase linear_case(double kappa, double lam) {
  auto g = std::make_shared<ExprFeedback>(expr::Expr::parse("-s0 + s1"), 2, 0.0);
  return {make_model("lin", {kappa}, g), lam, -std::expm1(-lam * kappa) / lam};
}

History exp_history(double lam) {
  return {[lam](double x) { return std::exp(lam * x); }, [lam](double x) { return lam * std::exp(lam * x); }};
}

double max_rel_error(const DenseTrajectory& t, double lam, bool midpoints) {
  double err = 0.0;
  for (std::size_t k = 0; k + 1 < t.n_nodes(); ++k) {
    const double x = t.node_x(k) + (midpoints ? 0.5 * t.step() : 0.0);
    const double exact = std::exp(lam * x);
    err = std::max(err, std::abs(t.value(x) - exact) / exact);
  }
  return err;
}

}  // namespace

TEST_CASE("exact exponential solution") {
  for (double kappa : {1.0, 0.73}) {
    CAPTURE(kappa);
    const LinearCase lc = linear_case(kappa, 0.5);
    const double h = kappa / 50.0;
    const DenseTrajectory a = integrate(lc.model, lc.c, exp_history(lc.lam), 10.0, {h, 1e9});
    const DenseTrajectory b = integrate(lc.model, lc.c, exp_history(lc.lam), 10.0, {h / 2, 1e9});
    const double ea = max_rel_error(a, lc.lam, false), eb = max_rel_error(b, lc.lam, false);
    CHECK(ea <= 1e-7);
    CHECK(ea / eb >= 12.0);
    CHECK(ea / eb <= 20.0);
    // Dense output between nodes keeps fourth-order accuracy.
    CHECK(max_rel_error(a, lc.lam, true) <= 1e-7);
    for (double x : {0.5, 3.3, 9.0}) CHECK(std::abs(a.residual(x)) <= 1e-6 * std::exp(lc.lam * x));
  }
}

TEST_CASE("Richardson ratio on smooth models") {
  // At the default step the step-halving differences are near rounding level,
  // so the ratio is measured from h = min(kappa) / 5.
  auto two = std::make_shared<ExprFeedback>(expr::Expr::parse("-s0 + (2*s1 - s1^2 + 2*s2 - s2^2) / 2"), 3, 0.0);
  for (const Model& m : {catalog("vanzon"), make_model("two", {1.0, 0.7}, two)}) {
    CAPTURE(m.name);
    for (double c : {4.6, 5.5}) {
      const TailSpec tail = make_tail(m, c, -1);
      // The profile leaves 1 near x = ln(1/delta) / lambda_u.
      const double x_end = std::log(1.0 / tail.delta) / tail.lambda_u + 40.0;
      const ConvergenceEstimate e = convergence_check(m, c, tail, x_end, m.min_delay() / 5.0);
      CHECK(e.ratio >= 12.0);
      CHECK(e.ratio <= 20.0);
    }
  }
}

TEST_CASE("equilibria are preserved") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const Model m = catalog(name);
    for (double level : {0.0, 1.0}) {
      const History h{[level](double) { return level; }, [](double) { return 0.0; }};
      const DenseTrajectory t = integrate(m, 2.0, h, 40.0);
      double drift = 0.0;
      for (std::size_t k = 0; k < t.n_nodes(); ++k) drift = std::max(drift, std::abs(t.node_value(k) - level));
      // Only rounding in g(1, ..., 1) can move the state.
      CHECK(drift <= 1e-12);
      if (level == 0.0) CHECK(drift == 0.0);
    }
  }
}

TEST_CASE("tails") {
  const Model m = catalog("vanzon");
  const TailSpec t = make_tail(m, 5.0, -1);
  // D(lambda; c, grad g(1)) = c lambda - 1 for van Zon.
  CHECK(t.lambda_u == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(t.value(0.0) == doctest::Approx(1.0 - kDefaultDelta).epsilon(1e-15));
  CHECK(t.slope(-2.0) == doctest::Approx(-kDefaultDelta * 0.2 * std::exp(-0.4)).epsilon(1e-12));
  CHECK(make_tail(m, 5.0, 1).value(0.0) > 1.0);
  CHECK_THROWS_AS(make_tail(m, 5.0, 0), InvalidArgument);
  CHECK_THROWS_AS(make_tail(m, 5.0, -1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_tail(m, 5.0, -1, 0.01), InvalidArgument);
  // exC is constant near 1, so its linear tail is exact and a large amplitude is fine.
  const Model c = catalog("exC");
  CHECK_NOTHROW(make_tail(c, 2.0, 1, 0.5));
}

TEST_CASE("tail amplitude only translates the front") {
  const Model m = catalog("vanzon");
  const double c = 6.0;
  const DenseTrajectory a = integrate(m, c, make_tail(m, c, -1, 1e-6), 150.0);
  const DenseTrajectory b = integrate(m, c, make_tail(m, c, -1, 5e-7), 150.0);
  CHECK(profile_gap(a, b, -10.0, 10.0) <= 1e-4);
  // The shift is ln 2 / lambda_u.
  const double shift = *anchor(b) - *anchor(a);
  CHECK(shift == doctest::Approx(std::log(2.0) / make_tail(m, c, -1).lambda_u).epsilon(1e-3));
}

TEST_CASE("blow-up and crossings") {
  const Model m = catalog("vanzon");
  const DenseTrajectory t = integrate(m, 1.0, make_tail(m, 1.0, -1), 3000.0);
  CHECK(t.blew_up());
  CHECK(t.blow_x() == t.x_end());
  CHECK(std::abs(t.node_value(t.n_nodes() - 1)) > 50.0);

  const DenseTrajectory f = integrate(m, 6.0, make_tail(m, 6.0, -1), 150.0);
  const auto x = f.crossing(0.5, 0.0, -1);
  REQUIRE(x.has_value());
  CHECK(std::abs(f.value(*x) - 0.5) <= 1e-10);
  CHECK(!f.crossing(0.5, 0.0, 1).has_value());
  CHECK(!f.crossing(2.0).has_value());
  const History w = f.window(*x);
  CHECK(w.value(-0.3) == f.value(*x - 0.3));
  CHECK_THROWS_AS(f.value(f.x_end() + 1.0), InvalidArgument);
}

TEST_CASE("integration arguments") {
  const Model m = catalog("vanzon");
  const TailSpec tail = make_tail(m, 5.0, -1);
  CHECK(default_step(m) == 0.02);
  CHECK_THROWS_AS(integrate(m, 0.0, tail, 1.0), InvalidArgument);
  CHECK_THROWS_AS(integrate(m, 5.0, tail, -1.0), InvalidArgument);
  CHECK_THROWS_AS(integrate(m, 5.0, tail, 1.0, {0.3}), InvalidArgument);
  // The stop predicate ends the run early.
  const DenseTrajectory t = integrate(m, 5.0, tail, 10.0, {}, [](const DenseTrajectory& d) { return d.x_end() >= 1.0; });
  CHECK(t.x_end() == doctest::Approx(1.0).epsilon(1e-12));
}
