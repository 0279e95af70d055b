#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lde/dual.hpp"
#include "lde/expr.hpp"
#include "lde/scalar_fn.hpp"

namespace lde {

/// Feedback function g(s0, s1, ..., sN) of a unidirectional lattice equation
/// u_p' = g(u_p, u_{chi_1(p)}, ..., u_{chi_N(p)}).
class Feedback {
 public:
  virtual ~Feedback() = default;
  virtual std::size_t arity() const = 0;
  virtual double operator()(std::span<const double> s) const = 0;
  virtual Dual operator()(std::span<const Dual> s) const = 0;
  virtual std::string describe() const = 0;
};

/// Exact gradient of g at s by forward-mode differentiation.
std::vector<double> gradient(const Feedback& g, std::span<const double> s);

/// g(s0, s1) = -s0 + f(s1).
class SeparableFeedback final : public Feedback {
 public:
  explicit SeparableFeedback(ScalarFn f) : f_(std::move(f)) {}
  std::size_t arity() const override { return 2; }
  double operator()(std::span<const double> s) const override { return -s[0] + f_(s[1]); }
  Dual operator()(std::span<const Dual> s) const override { return -s[0] + f_(s[1]); }
  std::string describe() const override { return "-s0 + " + f_.name() + "(s1)"; }
  const ScalarFn& f() const { return f_; }

 private:
  ScalarFn f_;
};

/// g(s0, s1) = -s0 + a0 f(s0) + a1 f(s1), the single-neighbour cellular neural network.
class CnnFeedback final : public Feedback {
 public:
  CnnFeedback(double a0, double a1, ScalarFn f) : a0_(a0), a1_(a1), f_(std::move(f)) {}
  std::size_t arity() const override { return 2; }
  double operator()(std::span<const double> s) const override {
    return -s[0] + a0_ * f_(s[0]) + a1_ * f_(s[1]);
  }
  Dual operator()(std::span<const Dual> s) const override {
    return -s[0] + Dual(a0_) * f_(s[0]) + Dual(a1_) * f_(s[1]);
  }
  std::string describe() const override;

 private:
  double a0_;
  double a1_;
  ScalarFn f_;
};

/// Upwind semi-discretization of u_t = -flux(u)_x + source(u) with spacing eps:
/// g(s0, s1) = -(flux(s0) - flux(s1)) / eps + source(s0).
class UpwindFeedback final : public Feedback {
 public:
  UpwindFeedback(ScalarFn flux, ScalarFn source, double eps)
      : flux_(std::move(flux)), source_(std::move(source)), eps_(eps) {}
  std::size_t arity() const override { return 2; }
  double operator()(std::span<const double> s) const override {
    return -(flux_(s[0]) - flux_(s[1])) / eps_ + source_(s[0]);
  }
  Dual operator()(std::span<const Dual> s) const override {
    return -(flux_(s[0]) - flux_(s[1])) / Dual(eps_) + source_(s[0]);
  }
  std::string describe() const override;

 private:
  ScalarFn flux_;
  ScalarFn source_;
  double eps_;
};

/// g given by a parsed expression in s0..sN.
class ExprFeedback final : public Feedback {
 public:
  ExprFeedback(expr::Expr e, std::size_t arity, double smoothing);
  std::size_t arity() const override { return arity_; }
  double operator()(std::span<const double> s) const override { return e_.eval(s, smoothing_); }
  Dual operator()(std::span<const Dual> s) const override { return e_.eval(s, smoothing_); }
  std::string describe() const override { return e_.print(); }
  const expr::Expr& expression() const { return e_; }

 private:
  expr::Expr e_;
  std::size_t arity_;
  double smoothing_;
};

/// Feedback on a reduced argument list: argument k of the wrapped function
/// receives reduced argument slot[k] (slot 0 is s0). Used when several
/// lattice neighbours share a delay or sit on the wave-front hyperplane.
class ReducedFeedback final : public Feedback {
 public:
  ReducedFeedback(std::shared_ptr<const Feedback> full, std::vector<std::size_t> slot,
                  std::size_t reduced_arity);
  std::size_t arity() const override { return reduced_arity_; }
  double operator()(std::span<const double> s) const override;
  Dual operator()(std::span<const Dual> s) const override;
  std::string describe() const override;

 private:
  std::shared_ptr<const Feedback> full_;
  std::vector<std::size_t> slot_;
  std::size_t reduced_arity_;
};

/// A lattice model reduced to its wave-profile data: delays kappa_i > 0,
/// feedback g, and the gradients of g at the diagonal points 0 and 1.
/// Immutable after construction; copies share the feedback.
struct Model {
  std::string name;
  std::vector<double> kappa;
  std::shared_ptr<const Feedback> g;
  std::vector<double> grad0;
  std::vector<double> grad1;
  std::optional<std::vector<double>> beta;
  double smoothing = 0.0;
  /// Set for catalog models of the form g = -s0 + f(s1).
  std::optional<ScalarFn> separable_f;
  /// Resolved construction parameters, recorded in output headers.
  std::map<std::string, double> params;

  std::size_t n_delays() const { return kappa.size(); }
  double history_length() const;
  double min_delay() const;
  double operator()(std::span<const double> s) const { return (*g)(s); }
};

/// Builds a model and fills in grad0/grad1; validates it.
Model make_model(std::string name, std::vector<double> kappa, std::shared_ptr<const Feedback> g,
                 std::optional<std::vector<double>> beta = std::nullopt, double smoothing = 0.0);

/// Throws InvalidArgument if the model invariants fail (positive delays,
/// arity N+1, gradients agreeing with central differences to 1e-6 relative).
void validate(const Model& model);

/// Default linear upper-bound vector for g = -s0 + f(s1): beta = (-1, sup_{0<t<1} f(t)/t * (1 + margin)).
/// The supremum is taken on a 1e-5 grid, refined locally, and includes the limit f'(0).
std::vector<double> separable_beta(const ScalarFn& f, double margin = 1e-3);

// ---------------------------------------------------------------------------
// Lattice geometry

struct GeometrySpec {
  int dim = 1;
  std::vector<double> xi;
  /// Offsets p - chi_i(p), one per neighbour.
  std::vector<std::vector<int>> offsets;

  /// Offsets from absolute lattice positions of a site and its neighbours.
  static GeometrySpec from_neighbors(std::vector<double> xi, const std::vector<int>& site,
                                     const std::vector<std::vector<int>>& neighbors);
};

struct ReducedDelays {
  /// Distinct positive delays, ascending.
  std::vector<double> kappa;
  /// Per original neighbour: reduced argument slot (0 = merged into s0).
  std::vector<std::size_t> slot;
  /// Number of neighbours sharing each reduced delay.
  std::vector<int> multiplicity;
  /// Raw delays xi . offset_i before merging.
  std::vector<double> raw;
};

ReducedDelays delays_from_geometry(const GeometrySpec& geom);

/// Model for a lattice equation given in terms of all neighbours; merges
/// zero and repeated delays by composing g.
Model model_from_geometry(std::string name, const GeometrySpec& geom,
                          std::shared_ptr<const Feedback> full_g,
                          std::optional<std::vector<double>> beta = std::nullopt);

// ---------------------------------------------------------------------------
// Catalog and model files

using Params = std::map<std::string, double>;

/// Catalog entries: vanzon, cnn, peletier, exB1, exB2, exC, exA.
Model catalog(std::string_view name, const Params& params = {});
std::vector<std::string> catalog_names();

/// Concave saturating map with f(0) = 0, f(1) = 1 and f'(0) = slope0 > 1.
ScalarFn saturating_exponential(double slope0);

/// Parses the key = value model configuration format (see docs/model-files.md).
Model parse_model_config(std::string_view text);
Model load_model_file(const std::filesystem::path& path);

}  // namespace lde
