// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "eabf/model.hpp"

namespace eabf {

/// Deterministic random stream used by the sampler and data generation.
/// Uniforms map the top 53 bits of mt19937_64 output to [0, 1); normals use
/// the polar Box-Muller method with one cached spare. Both mappings are
/// fully specified here so traces reproduce bit-for-bit across platforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Componentwise bijection between a constrained parameter and the real
/// line, with the log Jacobian |d theta / d x| for density corrections.
struct ComponentTransform {
  enum class Kind { identity, log, logit };
  Kind kind = Kind::identity;
  double lo = 0.0;  ///< logit: lower bound
  double hi = 1.0;  ///< logit: upper bound

  double to_unconstrained(double theta) const;
  double to_constrained(double x) const;
  double log_jacobian(double x) const;

  /// identity for normal, log for gamma, logit for uniform priors.
  static ComponentTransform for_prior(const PriorComponent& prior);
  static std::vector<ComponentTransform> for_prior(const PriorSpec& prior);
};

/// Forward-solver cost accounting accumulated over a chain.
struct SolverStats {
  long long n_evaluations = 0;    ///< forward solves performed
  long long n_adaptations = 0;    ///< halvings / doublings, summed
  long long n_tolerance_unmet = 0;

  double unmet_rate() const {
    return n_evaluations == 0
               ? 0.0
               : static_cast<double>(n_tolerance_unmet) /
                     static_cast<double>(n_evaluations);
  }
};

/// Value of the target log posterior at one point, with the solver
/// telemetry of the forward evaluation behind it.
struct LogPostValue {
  double value = 0.0;
  double k0_hat = 0.0;
  int adaptations = 0;
  bool tolerance_met = true;
  bool forward_evaluated = false;
};

/// Target density capability handed to run_chain; theta is in the original
/// (constrained) parameter space.
using LogPostFn = std::function<LogPostValue(std::span<const double>)>;

struct SamplerConfig {
  long long iterations = 0;
  long long burn_in = 0;
  std::uint64_t seed = 0;
  std::vector<double> initial;         ///< theta space
  std::vector<double> initial_scales;  ///< unconstrained space, > 0
  std::vector<ComponentTransform> transforms;  ///< empty = all identity
  long long adapt_window = 50;
  double target_accept = 0.234;
  /// Iteration after which adaptation freezes; -1 means burn_in.
  long long adapt_cutoff = -1;
};

/// Post-burn-in chain output. samples and scales are row-major.
struct Trace {
  std::size_t dim = 0;
  std::vector<double> samples;    ///< size() x dim, theta space
  std::vector<double> log_posts;  ///< theta-space log posterior per sample
  /// Effective per-component proposal sd at every iteration including
  /// burn-in (iterations x dim); constant after the adaptation cutoff.
  std::vector<double> scales;
  double acceptance_rate = 0.0;   ///< post burn-in
  double wall_seconds = 0.0;
  SolverStats solver;

  std::size_t size() const { return dim == 0 ? 0 : samples.size() / dim; }
  std::span<const double> sample(std::size_t i) const {
    return {samples.data() + i * dim, dim};
  }
  double component(std::size_t i, std::size_t j) const {
    return samples[i * dim + j];
  }
};

/// Adaptive random-walk Metropolis in unconstrained space. Proposals are
/// componentwise Gaussian; a global log-scale is driven toward the target
/// acceptance rate by stochastic approximation and per-component scales
/// follow the chain's running spread, both frozen at the adaptation cutoff
/// so the post-burn-in kernel is fixed. The Jacobian of the transform
/// enters the acceptance ratio; recorded log posteriors are theta-space.
/// Throws if the initial point has a non-finite log posterior.
Trace run_chain(const LogPostFn& logpost, const SamplerConfig& config);

/// Sample with the maximal recorded log posterior. Throws on empty traces.
std::vector<double> map_estimate(const Trace& trace);

/// Initial-positive-sequence (Geyer) effective sample size for one
/// component. Requires >= 100 samples; returns a value in (0, N]. A
/// zero-variance trace is degenerate and yields 1.0.
double effective_sample_size(const Trace& trace, std::size_t component);

}  // namespace eabf
