#include "lde/charspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lde/error.hpp"

namespace lde {

namespace {

// Safeguarded Newton on a sign-changing bracket [a, b].
template <class F, class DF>
double bracketed_root(F f, DF df, double a, double b) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw ComputationError("root bracket does not change sign");
  if (fa > 0.0) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  // Now f(a) < 0 < f(b); a and b may be in either order.
  double x = 0.5 * (a + b);
  for (int it = 0; it < 400; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    (fx < 0.0 ? a : b) = x;
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    const double d = df(x);
    double next = d != 0.0 ? x - fx / d : lo - 1.0;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) return next;
    x = next;
  }
  return x;
}

void require_admissible(const LinearCoeffs& a, const char* what) {
  a.check_shape();
  if (!(a.alpha[0] < 0.0)) throw InvalidArgument(std::string(what) + ": requires alpha_0 < 0");
  for (std::size_t i = 1; i < a.alpha.size(); ++i) {
    if (a.alpha[i] < 0.0) throw InvalidArgument(std::string(what) + ": requires alpha_i >= 0 for i >= 1");
  }
}

bool has_delayed_mass(const LinearCoeffs& a) {
  return std::any_of(a.alpha.begin() + 1, a.alpha.end(), [](double v) { return v > 0.0; });
}

double sum_delayed(const LinearCoeffs& a) {
  return std::accumulate(a.alpha.begin() + 1, a.alpha.end(), 0.0,
                         [](double s, double v) { return s + std::abs(v); });
}

double eval_R(double y, const LinearCoeffs& a) {
  double r = a.alpha[0];
  for (std::size_t i = 0; i < a.kappa.size(); ++i) r += a.alpha[i + 1] * std::cos(a.kappa[i] * y);
  return r;
}

double eval_dR(double y, const LinearCoeffs& a) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.kappa.size(); ++i) {
    r -= a.alpha[i + 1] * a.kappa[i] * std::sin(a.kappa[i] * y);
  }
  return r;
}

double crossing_speed(double y, const LinearCoeffs& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.kappa.size(); ++i) s += a.alpha[i + 1] * std::sin(a.kappa[i] * y);
  return s / y;
}

StabilityThreshold scan_threshold(const LinearCoeffs& a, double dy) {
  constexpr long kMaxSteps = 4'000'000;
  StabilityThreshold out;
  const double mass = sum_delayed(a);
  double best = 0.0;
  double y0 = 0.0, r0 = eval_R(0.0, a);
  for (long k = 1; k <= kMaxSteps; ++k) {
    const double y1 = k * dy;
    if (best > 0.0 && mass / y0 < best) break;
    const double r1 = eval_R(y1, a);
    if ((r0 > 0.0) != (r1 > 0.0) || r1 == 0.0) {
      const double y = r1 == 0.0 ? y1 : bracketed_root([&](double t) { return eval_R(t, a); },
                                                       [&](double t) { return eval_dR(t, a); }, y0, y1);
      const double cy = crossing_speed(y, a);
      out.candidates.emplace_back(y, cy);
      if (cy > best) {
        best = cy;
        out.y_star = y;
      }
    }
    y0 = y1;
    r0 = r1;
  }
  out.b = best;
  if (best <= 0.0) out.diagnostic = "no positive imaginary-axis crossing found";
  return out;
}

}  // namespace

double LinearCoeffs::sum() const { return std::accumulate(alpha.begin(), alpha.end(), 0.0); }

double LinearCoeffs::moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < kappa.size(); ++i) m += alpha[i + 1] * kappa[i];
  return m;
}

void LinearCoeffs::check_shape() const {
  if (alpha.size() != kappa.size() + 1) {
    throw InvalidArgument("alpha must have one more entry than kappa");
  }
  for (double k : kappa) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("delays must be positive");
  }
  for (double v : alpha) {
    if (!std::isfinite(v)) throw InvalidArgument("alpha must be finite");
  }
}

LinearCoeffs coeffs(std::vector<double> alpha, std::vector<double> kappa) {
  LinearCoeffs a{std::move(alpha), std::move(kappa)};
  a.check_shape();
  return a;
}

std::complex<double> eval_D(std::complex<double> lambda, double c, const LinearCoeffs& a) {
  std::complex<double> d = c * lambda + a.alpha[0];
  for (std::size_t i = 0; i < a.kappa.size(); ++i) d += a.alpha[i + 1] * std::exp(-a.kappa[i] * lambda);
  return d;
}

double eval_D(double x, double c, const LinearCoeffs& a) {
  double d = c * x + a.alpha[0];
  for (std::size_t i = 0; i < a.kappa.size(); ++i) d += a.alpha[i + 1] * std::exp(-a.kappa[i] * x);
  return d;
}

double eval_dD(double x, double c, const LinearCoeffs& a) {
  double d = c;
  for (std::size_t i = 0; i < a.kappa.size(); ++i) {
    d -= a.alpha[i + 1] * a.kappa[i] * std::exp(-a.kappa[i] * x);
  }
  return d;
}

double eval_d2D(double x, double, const LinearCoeffs& a) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.kappa.size(); ++i) {
    d += a.alpha[i + 1] * a.kappa[i] * a.kappa[i] * std::exp(-a.kappa[i] * x);
  }
  return d;
}

MinPoint min_point(double c, const LinearCoeffs& a) {
  a.check_shape();
  if (!(c > 0.0)) throw InvalidArgument("min_point: c must be positive");
  for (std::size_t i = 1; i < a.alpha.size(); ++i) {
    if (a.alpha[i] < 0.0) throw InvalidArgument("min_point: requires alpha_i >= 0 for i >= 1");
  }
  if (!has_delayed_mass(a)) throw InvalidArgument("min_point: D is affine (all delayed coefficients vanish)");
  double lo = -1.0, hi = 1.0;
  while (eval_dD(lo, c, a) > 0.0) lo *= 2.0;
  while (eval_dD(hi, c, a) < 0.0) hi *= 2.0;
  const double x = bracketed_root([&](double t) { return eval_dD(t, c, a); },
                                  [&](double t) { return eval_d2D(t, c, a); }, lo, hi);
  return {x, eval_D(x, c, a)};
}

std::vector<double> real_roots(double c, const LinearCoeffs& a) {
  a.check_shape();
  if (!(c > 0.0)) throw InvalidArgument("real_roots: c must be positive");
  if (!has_delayed_mass(a)) return {-a.alpha[0] / c};
  const MinPoint mp = min_point(c, a);
  if (std::abs(mp.D_tilde) <= kTangencyTol) return {mp.x_tilde};
  if (mp.D_tilde > 0.0) return {};
  auto f = [&](double t) { return eval_D(t, c, a); };
  auto df = [&](double t) { return eval_dD(t, c, a); };
  double step = 1.0;
  double left = mp.x_tilde - step;
  while (f(left) <= 0.0) left = mp.x_tilde - (step *= 2.0);
  step = 1.0;
  double right = mp.x_tilde + step;
  while (f(right) <= 0.0) right = mp.x_tilde + (step *= 2.0);
  return {bracketed_root(f, df, left, mp.x_tilde), bracketed_root(f, df, mp.x_tilde, right)};
}

double variational_F(double x, const LinearCoeffs& a) {
  double n = a.alpha[0];
  for (std::size_t i = 0; i < a.kappa.size(); ++i) n += a.alpha[i + 1] * std::exp(a.kappa[i] * x);
  return n / x;
}

CriticalSpeed critical_speed_report(const LinearCoeffs& a) {
  require_admissible(a, "critical_speed");
  if (!(a.sum() > 0.0)) {
    throw InvalidArgument(
        "critical_speed: sum of alpha must be positive (otherwise D has exactly one nonnegative real "
        "root for every c and no critical speed exists)");
  }
  // Route 1: minimise F over x > 0. N is the numerator of F' and is increasing.
  auto N = [&](double x) {
    double n = -a.alpha[0];
    for (std::size_t i = 0; i < a.kappa.size(); ++i) {
      n += a.alpha[i + 1] * (a.kappa[i] * x - 1.0) * std::exp(a.kappa[i] * x);
    }
    return n;
  };
  auto dN = [&](double x) {
    double n = 0.0;
    for (std::size_t i = 0; i < a.kappa.size(); ++i) {
      n += a.alpha[i + 1] * a.kappa[i] * a.kappa[i] * x * std::exp(a.kappa[i] * x);
    }
    return n;
  };
  double hi = 1.0;
  while (N(hi) < 0.0) hi *= 2.0;
  double lo = 0.0;
  {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double ga = hi * 1e-9, gb = hi;
    double x1 = gb - r * (gb - ga), x2 = ga + r * (gb - ga);
    double f1 = variational_F(x1, a), f2 = variational_F(x2, a);
    for (int it = 0; it < 20; ++it) {
      if (f1 < f2) {
        gb = x2; x2 = x1; f2 = f1;
        x1 = gb - r * (gb - ga); f1 = variational_F(x1, a);
      } else {
        ga = x1; x1 = x2; f1 = f2;
        x2 = ga + r * (gb - ga); f2 = variational_F(x2, a);
      }
    }
    if (N(ga) < 0.0) lo = ga;
    if (N(gb) > 0.0) hi = gb;
  }
  CriticalSpeed out;
  out.x_star = bracketed_root(N, dN, lo, hi);
  out.value = variational_F(out.x_star, a);

  // Route 2: D_tilde(c) is strictly decreasing with derivative x_tilde(c).
  const double c_lo = a.moment();
  double c_hi = 2.0 * c_lo;
  while (min_point(c_hi, a).D_tilde >= 0.0) c_hi *= 2.0;
  out.via_dual = bracketed_root([&](double c) { return -min_point(c, a).D_tilde; },
                                [&](double c) { return -min_point(c, a).x_tilde; }, c_lo, c_hi);
  if (std::abs(out.value - out.via_dual) > 1e-8 * out.value) {
    throw ComputationError("critical_speed: variational and dual routes disagree (" +
                           std::to_string(out.value) + " vs " + std::to_string(out.via_dual) + ")");
  }
  return out;
}

double critical_speed(const LinearCoeffs& a) { return critical_speed_report(a).value; }

StabilityThreshold stability_threshold_report(const LinearCoeffs& a) {
  require_admissible(a, "stability_threshold");
  if (!(a.sum() > 0.0)) throw InvalidArgument("stability_threshold: sum of alpha must be positive");
  const double kmax = *std::max_element(a.kappa.begin(), a.kappa.end());
  const double dy = M_PI / (20.0 * kmax);
  StabilityThreshold out = scan_threshold(a, dy);
  const StabilityThreshold fine = scan_threshold(a, 0.5 * dy);
  out.resolution_check = std::abs(fine.b - out.b) <= 1e-10 * std::max(1.0, out.b);
  if (!out.resolution_check) {
    out.diagnostic += (out.diagnostic.empty() ? "" : "; ") +
                      std::string("doubled-resolution rescan found b = ") + std::to_string(fine.b);
    if (fine.b > out.b) {
      out.b = fine.b;
      out.y_star = fine.y_star;
      out.candidates = fine.candidates;
    }
  }
  if (out.b > 0.0 && !(out.b < a.moment())) {
    out.diagnostic += (out.diagnostic.empty() ? "" : "; ") + std::string("b is not below sum alpha_i kappa_i");
  }
  return out;
}

double stability_threshold(const LinearCoeffs& a) { return stability_threshold_report(a).b; }

double unstable_root_at_one(double c, std::span<const double> grad1, std::span<const double> kappa) {
  const LinearCoeffs a = coeffs({grad1.begin(), grad1.end()}, {kappa.begin(), kappa.end()});
  if (!(c > 0.0)) throw InvalidArgument("unstable_root_at_one: c must be positive");
  require_admissible(a, "unstable_root_at_one");
  if (!(a.sum() < 0.0)) throw InvalidArgument("unstable_root_at_one: requires sum of grad g(1) < 0");
  if (!has_delayed_mass(a)) return -a.alpha[0] / c;
  double hi = 1.0;
  while (eval_D(hi, c, a) <= 0.0) hi *= 2.0;
  return bracketed_root([&](double t) { return eval_D(t, c, a); },
                        [&](double t) { return eval_dD(t, c, a); }, 0.0, hi);
}

DominantRoot dominant_root_at_zero(double c, std::span<const double> grad0, std::span<const double> kappa) {
  const LinearCoeffs a = coeffs({grad0.begin(), grad0.end()}, {kappa.begin(), kappa.end()});
  if (!(c > 0.0)) throw InvalidArgument("dominant_root_at_zero: c must be positive");
  require_admissible(a, "dominant_root_at_zero");
  if (!(a.sum() > 0.0)) throw InvalidArgument("dominant_root_at_zero: requires sum of grad g(0) > 0");
  if (!has_delayed_mass(a)) throw InvalidArgument("dominant_root_at_zero: no delayed coupling at 0");
  const MinPoint mp = min_point(c, a);
  if (std::abs(mp.D_tilde) <= kTangencyTol) return {mp.x_tilde, true};
  if (mp.D_tilde > 0.0) {
    throw NoRealRootsError("no real roots: c = " + std::to_string(c) +
                           " is below the critical speed, the leading roots at 0 are complex");
  }
  const std::vector<double> r = real_roots(c, a);
  return {r.back(), false};
}

}  // namespace lde
