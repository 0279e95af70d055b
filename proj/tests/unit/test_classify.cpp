#include <doctest.h>

#include <cmath>

#include "lde/charspec.hpp"
#include "lde/classify.hpp"
#include "lde/error.hpp"

using namespace lde;

TEST_CASE("regime names") {
  CHECK(to_string(Regime::MonotoneFront) == "MonotoneFront");
  CHECK(to_string(Regime::OscillatoryFront) == "OscillatoryFront");
  CHECK(to_string(Regime::BoundedNonFront) == "BoundedNonFront");
  CHECK(to_string(Regime::Unbounded) == "Unbounded");
  CHECK(to_string(Regime::Undetermined) == "Undetermined");
  CHECK(is_front(Regime::MonotoneFront));
  CHECK(is_front(Regime::OscillatoryFront));
  CHECK(!is_front(Regime::BoundedNonFront));
  CHECK(!is_front(Regime::Unbounded));
  CHECK(!is_front(Regime::Undetermined));
}

TEST_CASE("van Zon shots") {
  const Model m = catalog("vanzon");
  SUBCASE("fast speed gives a monotone front") {
    const Classification k = shoot_and_classify(m, 6.0);
    CHECK(k.kind == Regime::MonotoneFront);
    CHECK(k.monotone);
    CHECK(k.dwell_confirmed);
    CHECK(!k.first_crossing);
    CHECK(k.min_value >= 0.0);
    CHECK(std::abs(k.final_value) <= 1e-3);
  }
  SUBCASE("below the linear speed the front oscillates about 0") {
    // The dominant roots at 0 are complex below c(-1, 2), so a front cannot stay positive.
    const Classification k = shoot_and_classify(m, 4.2);
    CHECK(k.kind == Regime::OscillatoryFront);
    REQUIRE(k.first_crossing.has_value());
    CHECK(k.min_value < 0.0);
    CHECK(k.dwell_confirmed);
  }
  SUBCASE("slow speed blows up") {
    const Shot s = shoot(m, 1.0);
    CHECK(s.classification.kind == Regime::Unbounded);
    CHECK(s.trajectory.blew_up());
  }
}

TEST_CASE("horizon and dwell defaults") {
  const Model m = catalog("vanzon");
  ClassifyOptions o;
  o.horizon = 20.0;
  const Classification k = shoot_and_classify(m, 6.0, o);
  CHECK(k.x_end <= 20.0 + 1e-9);
  // A tighter ball needs a longer stay; either way the front is monotone.
  o = {};
  o.eps0 = 1e-6;
  CHECK(shoot_and_classify(m, 6.0, o).kind == Regime::MonotoneFront);
}

TEST_CASE("scan is independent of the worker count") {
  const Model m = catalog("peletier", {{"eps", 0.005}});
  const std::vector<double> cs{1.0, 1.5, 2.5, 4.2, 6.0};
  const auto a = scan_speeds(m, cs, {}, 1);
  const auto b = scan_speeds(m, cs, {}, 4);
  REQUIRE(a.size() == cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CHECK(a[i].c == cs[i]);
    CHECK(a[i].classification.kind == b[i].classification.kind);
    CHECK(a[i].classification.x_end == b[i].classification.x_end);
    CHECK(a[i].classification.final_value == b[i].classification.final_value);
  }
  CHECK(!is_front(a[0].classification.kind));
  CHECK(a[4].classification.kind == Regime::MonotoneFront);
}

TEST_CASE("bisection brackets straddle the predicate") {
  const Model m = catalog("vanzon");
  const BisectionResult r = find_c_m(m);
  CHECK(r.converged);
  CHECK(r.predicate_monotone);
  CHECK(r.lo < r.hi);
  CHECK(shoot_and_classify(m, r.lo).kind != Regime::MonotoneFront);
  CHECK(shoot_and_classify(m, r.hi).kind == Regime::MonotoneFront);
  const double c_lin = critical_speed(coeffs({-1.0, 2.0}, {1.0}));
  CHECK(std::abs(r.mid() - c_lin) <= 1e-3);
  CHECK(r.prescan.size() == 16);

  BisectionOptions bad;
  bad.lo = 6.0;
  bad.hi = 7.0;
  CHECK_THROWS_AS(find_c_m(m, bad), BracketError);
  bad.lo = 7.0;
  bad.hi = 6.0;
  CHECK_THROWS_AS(find_c_m(m, bad), InvalidArgument);
}

TEST_CASE("speed report") {
  const SpeedReport r = speed_report(catalog("vanzon"), false, false);
  CHECK(r.c_lin == doctest::Approx(4.31107).epsilon(1e-5));
  CHECK(r.b_lin == doctest::Approx(3.0 * std::sqrt(3.0) / M_PI).epsilon(1e-9));
  REQUIRE(r.c_beta.has_value());
  CHECK(*r.c_beta == doctest::Approx(r.c_lin).epsilon(1e-12));
  CHECK(!r.c_m);
  CHECK(!r.c_f);
}

TEST_CASE("Poincare section basics") {
  const Model m = catalog("exB1", {{"eps", 0.01}});
  const Shot s = shoot(m, 5.0);
  const double level = 0.02;
  const auto x = section_hit(s.trajectory, level, 1.0);
  REQUIRE(x.has_value());
  CHECK(std::abs(s.trajectory.value(*x) - level) <= 1e-10);
  SectionState psi{s.trajectory.window(*x), *x};
  CHECK(history_distance(psi.psi, psi.psi, 1.0) == 0.0);
  const PoincareReturn p = poincare_return(m, 5.0, level, psi);
  CHECK(p.tau >= 1.0);
  CHECK(std::abs(p.next.psi.value(0.0) - level) <= 1e-10);
  // A state that is below the level on [-r, 0] is not in the section.
  const SectionState off{History{[](double) { return 0.0; }, [](double) { return 0.0; }}, 0.0};
  CHECK_THROWS_AS(poincare_return(m, 5.0, level, off), InvalidArgument);
}
