// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "eabf/bound.hpp"
#include "eabf/burgers.hpp"
#include "eabf/forward.hpp"
#include "eabf/model.hpp"
#include "eabf/sampler.hpp"

namespace eabf {

enum class ProblemKind { logistic, burgers };

/// Discretization controls for the fine and adaptive forward maps.
struct SolverSettings {
  // Logistic integrator.
  double fine_h = 0.005;
  double h_init = 0.1;
  int max_halvings = 20;
  // Burgers finite volume.
  int fine_n = 512;
  int n_start = 128;
  int n_max = 512;
  double cfl = 0.1;
  double viscosity = 0.05;
  double u_left = 2.0;
  double z1 = 2.0;
  std::vector<int> calibration_grids = {64, 128, 256, 512};
  /// Calibrated observation-error constant; 0 means calibrate on the fly.
  double calibrated_k0 = 0.0;
  /// Overrides the bound-derived solver tolerance when > 0.
  double tolerance_override = 0.0;
};

/// One end-to-end synthetic study: data generation, tolerance from the
/// expected-Bayes-factor bound, fine vs adaptive posterior sampling.
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::logistic;
  std::vector<double> theta_true;
  double sigma = 30.0;
  double x0 = 100.0;  ///< logistic initial population
  std::vector<double> obs_times;
  PriorSpec prior;
  PrecisionSpec precision;
  double target_eabf = 0.05;
  std::uint64_t seed = 20170829;
  long long iterations = 40000;
  long long burn_in = -1;  ///< -1 selects 20% of iterations
  double target_accept = 0.234;  ///< proposal acceptance target
  std::vector<double> initial;         ///< empty = theta_true
  std::vector<double> initial_scales;  ///< empty = 0.1 per component
  SolverSettings solver;
  std::filesystem::path out_dir;  ///< empty = write nothing

  long long effective_burn_in() const {
    return burn_in >= 0 ? burn_in : iterations / 5;
  }
  /// Observation locations: times for the logistic problem, (z1, t) pairs
  /// for Burgers.
  Locations locations() const;
  void validate() const;
};

/// Distance summary between two marginal posteriors.
struct MarginalComparison {
  double tv = 0.0;            ///< binned total-variation estimate, [0, 1]
  double mean_delta_sd = 0.0; ///< |mean difference| in pooled-sd units
  double map_delta_sd = 0.0;  ///< |MAP difference| in pooled-sd units
};

struct ComparisonReport {
  std::vector<MarginalComparison> marginals;
  int bins = 50;
  double wall_ratio = 0.0;      ///< adaptive wall time / fine wall time
  double tolerance_used = 0.0;  ///< solver tolerance both chains received
  ToleranceReport bound;
  bool fine_bound_violating = false;      ///< unmet rate > 1%
  bool adaptive_bound_violating = false;  ///< unmet rate > 1%
};

struct ExperimentResult {
  Dataset data;
  ToleranceReport bound;
  double tolerance = 0.0;
  double calibrated_k0 = 0.0;  ///< burgers only
  Trace fine;
  Trace adaptive;
  ComparisonReport report;
  bool bound_violating = false;
  std::uint64_t data_seed = 0;
  std::uint64_t chain_seed = 0;
};

/// Synthetic data y_i = analytic(x_i; theta_true) + sigma * xi_i with
/// i.i.d. standard normal xi from the seeded stream. The analytic forward
/// map is used here and only here; the sampled posteriors always see the
/// numerical solver.
Dataset generate_synthetic(const ExperimentConfig& config);

/// Binned total-variation distance and moment deltas per marginal, over
/// common bin edges spanning the pooled sample range.
ComparisonReport compare_traces(const Trace& a, const Trace& b, int bins = 50);

/// One posterior leg (fixed fine solver or adaptive solver) on shared data.
/// Both legs use the chain seed config.seed + 1 so the proposal stream is
/// identical and any trace difference is solver-induced. calibrated_k0 is
/// the Burgers observation-error constant (ignored for the logistic
/// problem; must be > 0 for Burgers).
Trace run_posterior_chain(const ExperimentConfig& config, const Dataset& data,
                          SolveMode mode, double tolerance,
                          double calibrated_k0 = 0.0);

/// The configured Burgers error constant, or a fresh multi-grid calibration
/// at theta_true when the config leaves it at 0.
BurgersCalibration burgers_calibration(const ExperimentConfig& config);

/// Full study on a supplied dataset: tolerance from the bound (or the
/// override), fine and adaptive chains with one shared chain seed (common
/// random numbers, so the posterior comparison isolates solver-induced
/// differences), comparison report, artifacts written to out_dir when set.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const Dataset& data);

/// As above, generating the dataset from the config first.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Paper-scale reference configurations; every constant the experiments
/// print is centralized in these two functions.
ExperimentConfig reference_logistic_config();
ExperimentConfig reference_burgers_config();

}  // namespace eabf
