#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lde/expr.hpp"

using lde::expr::EvalError;
using lde::expr::Expr;
using lde::expr::ParseError;

namespace {

double ev(const std::string& text, std::vector<double> s = {}, double smoothing = 0.0) {
  return Expr::parse(text).eval(s, smoothing);
}

// Random expression over s0..s2 built from smooth operations only.
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_int_distribution<int> var(0, 2);
  std::uniform_real_distribution<double> num(0.1, 3.0);
  switch (pick(rng)) {
    case 0: return "s" + std::to_string(var(rng));
    case 1: return std::to_string(num(rng));
    case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 3: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 4: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 5: return "-" + random_expr(rng, depth - 1);
    case 6: return "exp(" + random_expr(rng, depth - 1) + " / 4)";
    case 7: return "tanh(" + random_expr(rng, depth - 1) + ")";
    case 8: return "(" + random_expr(rng, depth - 1) + ")^2";
    default: return random_expr(rng, depth - 1) + " / (2 + " + random_expr(rng, depth - 1) + "^2)";
  }
}

}  // namespace

TEST_CASE("van Zon expression") {
  const Expr g = Expr::parse("-s0 + 2*s1 - s1^2");
  CHECK(g.eval(std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK(g.eval(std::vector<double>{0.0, 1.0}) == 1.0);
  const auto g0 = g.grad(std::vector<double>{0.0, 0.0});
  const auto g1 = g.grad(std::vector<double>{1.0, 1.0});
  CHECK(g0 == std::vector<double>{-1.0, 2.0});
  CHECK(g1 == std::vector<double>{-1.0, 0.0});
  CHECK(g.max_variable() == 1);
}

TEST_CASE("Peletier expression") {
  CHECK(ev("min(2*s1, 1) - s0", {0.0, 0.75}) == 1.0);
  CHECK(ev("min(2*s1, 1) - s0", {0.0, 0.25}) == 0.5);
  // Smoothed and exact agree away from the kink.
  CHECK(ev("min(2*s1, 1) - s0", {0.0, 0.75}, 0.01) == 1.0);
}

TEST_CASE("precedence and associativity") {
  CHECK(ev("2^3^2") == 512.0);
  CHECK(ev("-2^2") == -4.0);
  CHECK(ev("(-2)^2") == 4.0);
  CHECK(ev("8/4/2") == 1.0);
  CHECK(ev("2-3-4") == -5.0);
  CHECK(ev("2*3+4") == 10.0);
  CHECK(ev("2+3*4") == 14.0);
  CHECK(ev("2*-3") == -6.0);
  CHECK(ev("1.5e2") == 150.0);
  CHECK(ev("max(1, 3, 2)") == 3.0);
  CHECK(ev("abs(-2.5)") == 2.5);
  CHECK(ev("ln(exp(1.25))") == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(ev("4^0.5") == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("parse errors carry offsets") {
  try {
    Expr::parse("s0 + (");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
    CHECK(!e.expected().empty());
  }
  CHECK_THROWS_AS(Expr::parse("foo(s0)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("s0 +* 2"), ParseError);
  CHECK_THROWS_AS(Expr::parse("s0)"), ParseError);
  CHECK_THROWS_AS(Expr::parse(""), ParseError);
  CHECK_THROWS_AS(Expr::parse("x1"), ParseError);
  try {
    Expr::parse("s0 + @");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(ev("1 / s0", {0.0}), EvalError);
  CHECK_THROWS_AS(ev("ln(s0)", {0.0}), EvalError);
  CHECK_THROWS_AS(ev("ln(s0)", {-1.0}), EvalError);
  CHECK_THROWS_AS(ev("s3", {0.0, 1.0}), EvalError);
  CHECK_THROWS_AS(ev("(-2)^0.5"), EvalError);
  // Gradients of kinked functions at the kink need smoothing.
  const Expr m = Expr::parse("min(s0, s1)");
  CHECK_THROWS_AS(m.grad(std::vector<double>{0.5, 0.5}), EvalError);
  CHECK_NOTHROW(m.grad(std::vector<double>{0.5, 0.5}, 0.01));
}

TEST_CASE("gradient of a constant is zero") {
  const Expr e = Expr::parse("3.5 * 2 - exp(1)");
  CHECK(e.max_variable() == -1);
  const auto g = e.grad(std::vector<double>{0.3, 0.7, 0.1});
  CHECK(g == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("print/parse round trip") {
  std::vector<std::string> fixed{"-s0 + 2*s1 - s1^2", "min(2*s1, 1) - s0", "2^3^2", "(2^3)^2", "-(s0 - s1) - s2",
                                 "s0 / (s1 * s2)", "s0 - (s1 - s2)", "-s0^2", "(-s0)^2", "max(s0, s1, 0.25)"};
  std::mt19937_64 rng(3);
  for (int k = 0; k < 300; ++k) fixed.push_back(random_expr(rng, 4));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& text : fixed) {
    const Expr a = Expr::parse(text);
    const std::string printed = a.print();
    const Expr b = Expr::parse(printed);
    CHECK_MESSAGE(b.print() == printed, text);
    const std::vector<double> s{u(rng), u(rng), u(rng)};
    double va = 0.0, vb = 0.0;
    bool fa = false, fb = false;
    try { va = a.eval(s); } catch (const EvalError&) { fa = true; }
    try { vb = b.eval(s); } catch (const EvalError&) { fb = true; }
    CHECK(fa == fb);
    if (!fa) CHECK_MESSAGE((va == vb || (std::isnan(va) && std::isnan(vb))), text);
  }
}

TEST_CASE("gradients match finite differences") {
  const std::vector<std::string> exprs{"-s0 + 2*s1 - s1^2", "-s0 + 0.5*tanh(3*s1) + 0.25*s2^3",
                                       "-s0 + exp(s1 - 1) * s1 / (1 + s2^2)", "-s0 + ln(2 + s1) * s2",
                                       "-s0 + min(2*s1, 1)", "-s0 + max(s1, 0.5*s2) - abs(s1 - 0.2)"};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.9, 1.1);
  for (const auto& text : exprs) {
    const Expr e = Expr::parse(text);
    const double smoothing = 0.05;
    int checked = 0;
    while (checked < 100) {
      std::vector<double> s{u(rng), u(rng), u(rng)};
      const auto g = e.grad(s, smoothing);
      bool ok = true;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double h = 1e-6;
        auto sp = s, sm = s;
        sp[i] += h;
        sm[i] -= h;
        const double fd = (e.eval(sp, smoothing) - e.eval(sm, smoothing)) / (2.0 * h);
        ok = ok && std::abs(fd - g[i]) <= 1e-6 * std::max(1.0, std::abs(g[i]));
      }
      CHECK_MESSAGE(ok, text);
      ++checked;
    }
  }
}

TEST_CASE("smoothed min/max converge to the exact functions") {
  const Expr mn = Expr::parse("min(s0, s1)");
  const Expr mx = Expr::parse("max(s0, s1)");
  const Expr ab = Expr::parse("abs(s1)");
  for (const auto& s : std::vector<std::vector<double>>{{0.3, 0.31}, {0.0, -0.02}, {0.7, 0.65}}) {
    double prev = 1e300;
    for (double eps : {0.1, 0.03, 0.001}) {
      const double err = std::abs(mn.eval(s, eps) - std::min(s[0], s[1])) +
                         std::abs(mx.eval(s, eps) - std::max(s[0], s[1])) +
                         std::abs(ab.eval(s, eps) - std::abs(s[1]));
      CHECK(err <= prev);
      prev = err;
    }
    CHECK(prev == 0.0);
  }
}
