#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace lde {

/// Coefficients alpha = (alpha_0, ..., alpha_N) and delays kappa_1..kappa_N of
/// D(lambda; c, alpha) = c lambda + alpha_0 + sum_i alpha_i exp(-kappa_i lambda).
struct LinearCoeffs {
  std::vector<double> alpha;
  std::vector<double> kappa;

  double sum() const;           // sum of all alpha_i
  double moment() const;        // sum_{i>=1} alpha_i kappa_i
  void check_shape() const;     // throws InvalidArgument on size mismatch / bad delays
};

LinearCoeffs coeffs(std::vector<double> alpha, std::vector<double> kappa);

std::complex<double> eval_D(std::complex<double> lambda, double c, const LinearCoeffs& a);
double eval_D(double x, double c, const LinearCoeffs& a);
/// First and second derivative of D in lambda along the real axis.
double eval_dD(double x, double c, const LinearCoeffs& a);
double eval_d2D(double x, double c, const LinearCoeffs& a);

struct MinPoint {
  double x_tilde = 0.0;
  double D_tilde = 0.0;
};

/// Unique real minimum of D(.; c, alpha). Needs alpha_i >= 0 (i >= 1), not all zero.
MinPoint min_point(double c, const LinearCoeffs& a);

/// |D_tilde| at or below this is treated as a double root.
inline constexpr double kTangencyTol = 1e-9;

/// Real roots of D(.; c, alpha), ascending. A tangency is returned once.
std::vector<double> real_roots(double c, const LinearCoeffs& a);

struct CriticalSpeed {
  double value = 0.0;      // min_{x>0} F(x)
  double via_dual = 0.0;   // zero of c -> D_tilde(c)
  double x_star = 0.0;     // minimiser of F
};

/// c(alpha) by both routes; throws ComputationError if they disagree by more than 1e-8 relative.
CriticalSpeed critical_speed_report(const LinearCoeffs& a);
double critical_speed(const LinearCoeffs& a);

/// F(x) = (alpha_0 + sum alpha_i e^{kappa_i x}) / x.
double variational_F(double x, const LinearCoeffs& a);

struct StabilityThreshold {
  double b = 0.0;
  double y_star = 0.0;                                 // crossing frequency attaining b
  std::vector<std::pair<double, double>> candidates;   // (y, c(y)) for every root y of R
  bool resolution_check = true;                        // doubled-resolution rescan agreed
  std::string diagnostic;
};

StabilityThreshold stability_threshold_report(const LinearCoeffs& a);
double stability_threshold(const LinearCoeffs& a);

/// Unique positive root of D(.; c, grad1) at the equilibrium 1.
double unstable_root_at_one(double c, std::span<const double> grad1, std::span<const double> kappa);

struct DominantRoot {
  double lambda = 0.0;
  bool double_root = false;
};

/// Larger negative real root of D(.; c, grad0); NoRealRootsError when c < c(grad0).
DominantRoot dominant_root_at_zero(double c, std::span<const double> grad0, std::span<const double> kappa);

}  // namespace lde
