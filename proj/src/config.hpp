#pragma once

#include "operators.hpp"
#include "potential.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bgk {

enum class DomainMode { PerH, Shared, Explicit };

struct DomainOverride {
  double h = 0.0;
  Interval domain;
};

struct GridConfig {
  int N = 200;
  int K = 24;
  double doubler_scale = 1.0;
  DomainMode mode = DomainMode::PerH;
  Interval domain;  // DomainMode::Explicit
  std::vector<DomainOverride> overrides;
};

struct Tolerances {
  std::optional<double> delta_hat;  // default tau_hat / 4
  double delta1_fraction = 0.5;     // inner annulus radius as a fraction of delta_hat
  double separation_threshold = 10.0;
  double sigma_rel_tol = 1e-6;
  int max_iterations = 200;
  long dense_eigen_limit = 6000;
  long dense_svd_limit = 400;
  int contour_nodes = 64;
  double expmv_tol = 1e-8;
  double gap_tolerance = 0.05;
  double pt_rel_tol = 1e-13;
  double realness_tol = 1e-10;
  double projector_tol = 1e-6;
  double idempotency_tol = 1e-8;
  double kappa_gram_min = 0.9;
  double kappa_gram_h_max = 0.1;
  double projector_norm_max = 2.0;
  double bridge_rel_tol = 1e-8;
  double steady_state_tol = 1e-3;
  double steady_state_time = 10.0;
};

struct ResolventConfig {
  int n_angles = 32;
  int n_radii = 4;
  int n_line = 8;
};

struct SemigroupConfig {
  int n_times = 60;
  double span = 15.0;  // final time in units of 1 / predicted rate
};

struct MetastableConfig {
  int start_well = -1;  // -1: shallowest minimum
  double late_factor = 50.0;
  int per_decade = 20;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"witten",     "spectrum",  "resolvent", "hypo",
                                               "ptsym",      "semigroup", "metastable"};
  return names;
}

struct ExperimentConfig {
  std::string preset = "double_well";  // empty when coefficients are given
  double tilt = 0.2;
  PotentialSpec potential = double_well();
  GridConfig grid;
  std::vector<double> h_values{0.2, 0.15, 0.1, 0.08};
  std::vector<std::string> experiments{"spectrum"};
  std::string output_dir = "out";
  std::uint64_t arnoldi_seed = 20240521;
  Tolerances tolerances;
  ResolventConfig resolvent;
  SemigroupConfig semigroup;
  MetastableConfig metastable;

  bool wants(const std::string& name) const;
};

// Strict parsing: unknown keys, wrong types and invalid values raise ConfigParse
// errors naming the offending key path (and line for syntax errors).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Normalizes the h list (descending) and checks invariants.
void validate(ExperimentConfig& config);

void set_preset(ExperimentConfig& config, const std::string& name);

GridSpec grid_for(const ExperimentConfig& config, double h);

// Canonical JSON text of the configuration.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace bgk
