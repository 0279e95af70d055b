#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "lde/charspec.hpp"
#include "lde/error.hpp"

using namespace lde;
using cd = std::complex<double>;

namespace {

const LinearCoeffs vz = coeffs({-1.0, 2.0}, {1.0});

// Independent evaluation of D written out from its definition.
double D_direct(double x, double c, const std::vector<double>& a, const std::vector<double>& k) {
  double s = c * x + a[0];
  for (std::size_t i = 0; i < k.size(); ++i) s += a[i + 1] * std::exp(-k[i] * x);
  return s;
}

// Sign-change scan on a uniform grid followed by plain bisection.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, double dx) {
  std::vector<double> roots;
  double a = lo, fa = f(a);
  for (double b = lo + dx; b <= hi + 1e-12; b += dx) {
    const double fb = f(b);
    if ((fa > 0) != (fb > 0)) {
      double l = a, r = b, fl = fa;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (l + r), fm = f(m);
        if ((fm > 0) == (fl > 0)) {
          l = m;
          fl = fm;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

// Number of zeros of D inside the rectangle [x0, x1] x [-y, y] by the argument principle.
int winding_count(double c, const LinearCoeffs& a, double x0, double x1, double y, int n = 20000) {
  auto D = [&](cd z) { return eval_D(z, c, a); };
  std::vector<cd> path;
  auto seg = [&](cd p, cd q) {
    for (int k = 0; k < n; ++k) path.push_back(p + (q - p) * (double(k) / n));
  };
  seg({x0, -y}, {x1, -y});
  seg({x1, -y}, {x1, y});
  seg({x1, y}, {x0, y});
  seg({x0, y}, {x0, -y});
  double total = 0.0;
  cd prev = D(path.front());
  for (std::size_t k = 1; k <= path.size(); ++k) {
    const cd cur = D(path[k % path.size()]);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace

TEST_CASE("eval_D basic values") {
  CHECK(eval_D(0.0, 3.7, vz) == doctest::Approx(1.0).epsilon(1e-15));
  const double c = 2.5;
  CHECK(std::abs(eval_D(1.0 / c, c, coeffs({-1.0, 0.0}, {1.0}))) <= 1e-15);
  const double cb = 3.0 * std::sqrt(3.0) / std::numbers::pi;
  const cd z = eval_D(cd(0.0, std::numbers::pi / 3.0), cb, vz);
  CHECK(std::abs(z) <= 1e-14);
  for (double x : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
    CHECK(eval_D(x, 4.0, vz) == doctest::Approx(D_direct(x, 4.0, {-1, 2}, {1})).epsilon(1e-14));
  }
}

TEST_CASE("derivatives of D match finite differences") {
  const LinearCoeffs a = coeffs({-1.0, 0.5, 1.5}, {0.7, 2.0});
  for (double x : {-1.0, 0.0, 0.8}) {
    const double h = 1e-5;
    CHECK(eval_dD(x, 3.0, a) == doctest::Approx((eval_D(x + h, 3.0, a) - eval_D(x - h, 3.0, a)) / (2 * h)).epsilon(1e-8));
    CHECK(eval_d2D(x, 3.0, a) ==
          doctest::Approx((eval_dD(x + h, 3.0, a) - eval_dD(x - h, 3.0, a)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("min_point") {
  SUBCASE("c equal to the first moment gives x = 0") {
    const MinPoint m = min_point(2.0, vz);
    CHECK(std::abs(m.x_tilde) <= 1e-12);
    CHECK(m.D_tilde == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("critical speed gives a vanishing minimum") {
    CHECK(std::abs(min_point(4.31107, vz).D_tilde) <= 1e-4);
  }
  SUBCASE("c = 10 against a dense grid minimum") {
    const MinPoint m = min_point(10.0, vz);
    CHECK(m.D_tilde < 0.0);
    CHECK(D_direct(-1.0, 10.0, {-1, 2}, {1}) < 0.0);
    double best = 1e300, arg = 0.0;
    for (double x = -10.0; x <= 10.0; x += 1e-4) {
      const double v = D_direct(x, 10.0, {-1, 2}, {1});
      if (v < best) {
        best = v;
        arg = x;
      }
    }
    CHECK(m.D_tilde == doctest::Approx(best).epsilon(1e-8));
    CHECK(m.x_tilde == doctest::Approx(arg).epsilon(1e-3));
    // c = sum alpha_i kappa_i exp(-kappa_i x)
    CHECK(2.0 * std::exp(-m.x_tilde) == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(eval_d2D(m.x_tilde, 10.0, vz) > 0.0);
  }
  SUBCASE("affine D is rejected") {
    CHECK_THROWS_AS(min_point(1.0, coeffs({-1.0, 0.0}, {1.0})), InvalidArgument);
  }
}

TEST_CASE("real_roots") {
  SUBCASE("negative sum: one positive and one negative root") {
    const LinearCoeffs a = coeffs({-3.0, 2.0}, {1.0});
    const auto r = real_roots(1.0, a);
    REQUIRE(r.size() == 2);
    CHECK(r[0] < 0.0);
    CHECK(r[1] > 0.0);
    for (double x : r) CHECK(std::abs(eval_D(x, 1.0, a)) <= 1e-10 * 4.0);
    const auto oracle = scan_roots([&](double x) { return D_direct(x, 1.0, {-3, 2}, {1}); }, -20, 20, 1e-3);
    REQUIRE(oracle.size() == 2);
    CHECK(r[0] == doctest::Approx(oracle[0]).epsilon(1e-9));
    CHECK(r[1] == doctest::Approx(oracle[1]).epsilon(1e-9));
  }
  SUBCASE("c = 5: two negative roots") {
    const auto r = real_roots(5.0, vz);
    const auto oracle = scan_roots([&](double x) { return D_direct(x, 5.0, {-1, 2}, {1}); }, -20, 5, 1e-3);
    REQUIRE(r.size() == 2);
    REQUIRE(oracle.size() == 2);
    CHECK(r[1] < 0.0);
    CHECK(r[0] == doctest::Approx(oracle[0]).epsilon(1e-9));
    CHECK(r[1] == doctest::Approx(oracle[1]).epsilon(1e-9));
    for (double x : r) CHECK(std::abs(eval_D(x, 5.0, vz)) <= 2e-10);
  }
  SUBCASE("c = 3: none") { CHECK(real_roots(3.0, vz).empty()); }
}

TEST_CASE("critical speed") {
  SUBCASE("reference value for (-1, 2)") {
    const CriticalSpeed cs = critical_speed_report(vz);
    CHECK(std::abs(cs.value - 4.31107) <= 1e-4);
    CHECK(std::abs(cs.value - cs.via_dual) <= 1e-8 * cs.value);
  }
  SUBCASE("(-1, 3) against a dense grid minimisation of F") {
    const LinearCoeffs a = coeffs({-1.0, 3.0}, {1.0});
    double best = 1e300;
    for (double x = 0.5; x <= 3.0; x += 1e-6) best = std::min(best, (-1.0 + 3.0 * std::exp(x)) / x);
    CHECK(critical_speed(a) == doctest::Approx(best).epsilon(1e-10));
  }
  SUBCASE("increasing in each delay") {
    const LinearCoeffs a = coeffs({-1.0, 1.0, 0.5}, {1.0, 1.5});
    const LinearCoeffs b = coeffs({-1.0, 1.0, 0.5}, {2.0, 1.5});
    const LinearCoeffs d = coeffs({-1.0, 1.0, 0.5}, {2.0, 3.0});
    CHECK(critical_speed(b) > critical_speed(a));
    CHECK(critical_speed(d) > critical_speed(b));
    CHECK(critical_speed(coeffs({-1.0, 2.0}, {2.0})) > critical_speed(vz));
  }
  SUBCASE("duality identities") {
    const double c = critical_speed(vz);
    const MinPoint m = min_point(c, vz);
    CHECK(std::abs(m.D_tilde) <= 1e-8);
    CHECK(variational_F(-m.x_tilde, vz) == doctest::Approx(c).epsilon(1e-8));
    double prev = min_point(2.0, vz).D_tilde;
    for (double cc = 2.1; cc < 12.0; cc += 0.1) {
      const double d = min_point(cc, vz).D_tilde;
      CHECK(d < prev);
      prev = d;
    }
  }
  SUBCASE("nonpositive sum is rejected") {
    CHECK_THROWS_AS(critical_speed(coeffs({-2.0, 1.0}, {1.0})), InvalidArgument);
  }
}

TEST_CASE("stability threshold") {
  SUBCASE("reference value for (-1, 2)") {
    const StabilityThreshold b = stability_threshold_report(vz);
    CHECK(b.b == doctest::Approx(3.0 * std::sqrt(3.0) / std::numbers::pi).epsilon(1e-10));
    CHECK(b.y_star == doctest::Approx(std::numbers::pi / 3.0).epsilon(1e-10));
    CHECK(b.resolution_check);
    CHECK(b.b < 2.0);
    CHECK(2.0 < critical_speed(vz));
  }
  SUBCASE("(-1, 1, 1) with delays (1, 2) against root counting") {
    const LinearCoeffs a = coeffs({-1.0, 1.0, 1.0}, {1.0, 2.0});
    const double b = stability_threshold(a);
    // Roots with Re >= 0 satisfy |c lambda - 1| <= 2, so they lie in a bounded box.
    auto unstable = [&](double c) { return winding_count(c, a, -1e-9, 3.0 / c + 1.0, 3.0 / c + 1.0) > 0; };
    double lo = 0.2, hi = 5.0;
    REQUIRE(unstable(lo));
    REQUIRE(!unstable(hi));
    for (double c = hi; c > lo; c -= 0.01) {
      if (unstable(c)) {
        lo = c;
        hi = c + 0.01;
        break;
      }
    }
    while (hi - lo > 1e-7) {
      const double m = 0.5 * (lo + hi);
      (unstable(m) ? lo : hi) = m;
    }
    CHECK(b == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
  }
}

TEST_CASE("complex roots lie left of the real roots") {
  const double c = 5.0;
  const auto real = real_roots(c, vz);
  REQUIRE(real.size() == 2);
  int found = 0;
  for (double x0 = -8.0; x0 <= 1.0; x0 += 0.5) {
    for (double y0 = 1.0; y0 <= 60.0; y0 += 1.0) {
      cd z(x0, y0);
      for (int it = 0; it < 100; ++it) {
        const cd f = eval_D(z, c, vz);
        const cd df = c - 2.0 * std::exp(-z);
        z -= f / df;
      }
      if (std::abs(eval_D(z, c, vz)) < 1e-10 && std::abs(z.imag()) > 1e-6) {
        ++found;
        CHECK(z.real() < real[0]);
      }
    }
  }
  CHECK(found > 0);
}

TEST_CASE("sandwich on random coefficients") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> a0(-3.0, -0.1), ai(0.0, 2.0), kk(0.2, 3.0);
  std::uniform_int_distribution<int> nn(1, 4);
  int cases = 0;
  while (cases < 200) {
    const int n = nn(rng);
    std::vector<double> alpha{a0(rng)}, kappa;
    for (int i = 0; i < n; ++i) {
      alpha.push_back(ai(rng));
      kappa.push_back(kk(rng));
    }
    const LinearCoeffs a = coeffs(alpha, kappa);
    if (!(a.sum() > 0.0)) continue;
    ++cases;
    const double b = stability_threshold(a);
    const double c = critical_speed(a);
    CHECK(0.0 < b);
    CHECK(b < a.moment());
    CHECK(a.moment() < c);
    CHECK(std::abs(min_point(c, a).D_tilde) <= 1e-8);
  }
}

TEST_CASE("c(beta) dominates c(grad g(0))") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const LinearCoeffs g0 = coeffs({-1.0 - u(rng), 1.0 + 2.0 * u(rng), u(rng)}, {1.0, 0.5 + u(rng)});
    if (!(g0.sum() > 0.0)) continue;
    LinearCoeffs beta = g0;
    for (double& v : beta.alpha) v += 0.3 * u(rng);
    if (!(beta.sum() > g0.sum())) continue;
    CHECK(critical_speed(beta) >= critical_speed(g0));
  }
}

TEST_CASE("unstable root at 1") {
  const std::vector<double> k{1.0};
  for (double c : {2.0, 5.0, 7.3}) {
    CHECK(unstable_root_at_one(c, std::vector<double>{-1.0, 0.0}, k) == doctest::Approx(1.0 / c).epsilon(1e-14));
  }
  CHECK(unstable_root_at_one(5.0, std::vector<double>{-1.0, 0.0}, k) == doctest::Approx(0.2).epsilon(1e-14));
  const std::vector<double> g1{-2.0, 0.5};
  const double l = unstable_root_at_one(3.0, g1, k);
  CHECK(l > 0.0);
  CHECK(std::abs(D_direct(l, 3.0, g1, k)) <= 1e-12 * 3.0);
  CHECK_THROWS_AS(unstable_root_at_one(3.0, std::vector<double>{1.0, 0.5}, k), InvalidArgument);
}

TEST_CASE("dominant root at 0") {
  const std::vector<double> g0{-1.0, 2.0}, k{1.0};
  const DominantRoot d = dominant_root_at_zero(5.0, g0, k);
  const auto oracle = scan_roots([&](double x) { return D_direct(x, 5.0, g0, k); }, -20, 0, 1e-3);
  REQUIRE(oracle.size() == 2);
  CHECK(d.lambda == doctest::Approx(oracle[1]).epsilon(1e-9));
  CHECK(!d.double_root);

  const double cs = critical_speed(vz);
  const DominantRoot t = dominant_root_at_zero(cs, g0, k);
  CHECK(t.double_root);
  CHECK(t.lambda == doctest::Approx(min_point(cs, vz).x_tilde).epsilon(1e-6));
  CHECK_THROWS_AS(dominant_root_at_zero(cs - 1e-3, g0, k), NoRealRootsError);
}
