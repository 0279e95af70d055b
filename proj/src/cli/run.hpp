#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lde/classify.hpp"
#include "lde/hypotheses.hpp"
#include "lde/lattice.hpp"
#include "lde/model.hpp"

namespace lde::cli {

struct RunConfig {
  std::string subcommand;

  // model source
  std::string model = "vanzon";
  std::string model_file;
  std::vector<std::string> params;   // "k=v"

  std::string out = "-";
  std::size_t workers = 0;           // 0: LDE_WORKERS or hardware concurrency
  std::uint64_t seed = 1;

  // integration and classification
  double step = 0.0;
  double horizon = 0.0;
  double eps0 = 1e-3;
  double dwell = 0.0;
  double delta = kDefaultDelta;
  int branch = -1;
  double m_blow = 50.0;

  // speeds / scan
  std::vector<double> c;
  std::string c_range;               // "lo:hi:n"
  std::string bisect = "none";       // none, cm, cf, both
  std::optional<double> bracket_lo;
  std::optional<double> bracket_hi;
  std::optional<double> width;
  std::size_t prescan = 16;

  // front
  std::optional<double> x_min;
  std::optional<double> x_max;
  double resolution = 0.05;

  // check
  int n_grid = 64;
  double box_top = 10.0;

  // simulate
  std::string initial = "step";
  double t_end = 100.0;
  double dt = 0.05;
  double snapshot = 1.0;
  std::size_t sites = 0;
  std::optional<double> left_boundary;
  double theta = 0.5;

  // poincare
  std::optional<double> level;
  int iterations = 3;
  std::string states_out;

  // experiment
  std::string experiment;
  std::string out_dir;
};

/// Process entry point: 0 success, 1 computational failure, 2 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

Params parse_params(const std::vector<std::string>& items);
Model load_model(const RunConfig& cfg);
ClassifyOptions classify_options(const RunConfig& cfg);
CheckOptions check_options(const RunConfig& cfg);
std::size_t worker_count(const RunConfig& cfg);

/// Checks overrides against the model before any computation starts.
void validate(const RunConfig& cfg, const Model& model);

/// Resolved configuration embedded in every CSV. Worker count is left out on
/// purpose: results do not depend on it.
nlohmann::json config_json(const RunConfig& cfg, const Model& model);

/// Runs `experiment <name>`; returns the number of failed checks.
int run_experiment(const RunConfig& cfg, std::ostream& log);

}  // namespace lde::cli
