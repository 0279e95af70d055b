#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lde/model.hpp"

namespace lde {

enum class Status { Verified, Marginal, Violated, Inapplicable };

/// "verified-on-grid", "marginal", "violated", "inapplicable".
std::string to_string(Status s);

struct Witness {
  std::vector<double> s;
  double value = 0.0;        // value of the quantity that broke the inequality
  std::string inequality;    // what should have held
};

struct ClauseReport {
  std::string name;          // G1.1, G1.2, G1.3, G2, G3
  Status status = Status::Inapplicable;
  double worst_margin = 0.0;
  std::size_t samples = 0;
  std::optional<Witness> witness;
  std::string note;
};

struct G3Constants {
  double M0 = 0.0;
  double eta = 0.0;
  double M = 0.0;              // a priori bound on bounded solutions
  double slope_bound = 0.0;    // c |phi|' >= (1 - eta) M0 when |phi| first reaches M
};

struct CheckOptions {
  int n_grid = 64;
  std::uint64_t seed = 1;
  double box_top = 10.0;
  /// Cap on the number of grid points per clause; the per-axis resolution is
  /// reduced for many delays.
  std::size_t max_grid_points = 2'000'000;
};

struct HypothesisReport {
  std::vector<ClauseReport> clauses;
  int n_grid = 0;
  std::optional<std::vector<double>> suggested_beta;
  std::optional<G3Constants> g3;

  const ClauseReport& clause(const std::string& name) const;
};

/// Clauses G1.1, G1.2, G1.3 (the last needs model.beta or an explicit beta).
std::vector<ClauseReport> check_G1(const Model& model, const CheckOptions& opts = {},
                                   const std::optional<std::vector<double>>& beta = std::nullopt);
ClauseReport check_G2(const Model& model, const CheckOptions& opts = {});
ClauseReport check_G3(const Model& model, const CheckOptions& opts = {}, G3Constants* constants = nullptr);

/// Lower half of G1.3 alone: g(s) > 0 on {0 < s0 < s_i < 1}.
ClauseReport check_G13_lower(const Model& model, const CheckOptions& opts = {});

/// beta = (-1, sup f(t)/t (1 + 1e-3)) for catalog models of the form g = -s0 + f(s1);
/// nullopt for other models.
std::optional<std::vector<double>> suggest_beta(const Model& model);

HypothesisReport check_hypotheses(const Model& model, const CheckOptions& opts = {});

}  // namespace lde
