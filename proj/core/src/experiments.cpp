// SPDX-License-Identifier: Apache-2.0
#include "eabf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "eabf/config.hpp"
#include "eabf/forward.hpp"
#include "eabf/io.hpp"

namespace eabf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Locations ExperimentConfig::locations() const {
  if (problem == ProblemKind::logistic) {
    return Locations::at_times(obs_times);
  }
  return Locations::at_point_times(solver.z1, obs_times);
}

void ExperimentConfig::validate() const {
  if (theta_true.size() != 2) {
    throw std::invalid_argument("ExperimentConfig: theta_true must have 2 components");
  }
  if (obs_times.empty()) {
    throw std::invalid_argument("ExperimentConfig: no observation times");
  }
  if (!std::is_sorted(obs_times.begin(), obs_times.end())) {
    throw std::invalid_argument("ExperimentConfig: obs_times must be sorted");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("ExperimentConfig: sigma must be > 0");
  }
  if (prior.dim() != theta_true.size()) {
    throw std::invalid_argument("ExperimentConfig: prior dimension mismatch");
  }
  if (iterations < 1 || effective_burn_in() > iterations) {
    throw std::invalid_argument("ExperimentConfig: bad iteration counts");
  }
  if (!(target_eabf > 0.0) || !(target_eabf > 0.0 && target_eabf <= 1.0)) {
    throw std::invalid_argument("ExperimentConfig: target_eabf outside (0, 1]");
  }
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw std::invalid_argument(
        "ExperimentConfig: target_accept outside (0, 1)");
  }
  if (!initial.empty() && initial.size() != theta_true.size()) {
    throw std::invalid_argument("ExperimentConfig: initial size mismatch");
  }
  if (!initial_scales.empty() && initial_scales.size() != theta_true.size()) {
    throw std::invalid_argument("ExperimentConfig: initial_scales size mismatch");
  }
  if (problem == ProblemKind::logistic && !(x0 > 0.0)) {
    throw std::invalid_argument("ExperimentConfig: x0 must be > 0");
  }
}

namespace {

std::shared_ptr<const ForwardEvaluator> make_exact_evaluator(
    const ExperimentConfig& config) {
  if (config.problem == ProblemKind::logistic) {
    return std::make_shared<LogisticExactEvaluator>(config.x0,
                                                    config.obs_times);
  }
  return std::make_shared<BurgersExactEvaluator>(
      config.solver.u_left, config.solver.viscosity, config.solver.z1,
      config.obs_times);
}

std::shared_ptr<const ForwardEvaluator> make_numerical_evaluator(
    const ExperimentConfig& config, SolveMode mode, double calibrated_k0) {
  if (config.problem == ProblemKind::logistic) {
    const double h = mode == SolveMode::fixed ? config.solver.fine_h
                                              : config.solver.h_init;
    return std::make_shared<LogisticOdeEvaluator>(
        config.x0, config.obs_times, mode, h, config.solver.max_halvings);
  }
  BurgersFvEvaluator::Settings s;
  s.u_left = config.solver.u_left;
  s.viscosity = config.solver.viscosity;
  s.z1 = config.solver.z1;
  s.cfl = config.solver.cfl;
  s.mode = mode;
  s.n_fixed = config.solver.fine_n;
  s.n_start = config.solver.n_start;
  s.n_max = config.solver.n_max;
  s.calibrated_k0 = calibrated_k0;
  return std::make_shared<BurgersFvEvaluator>(s, config.obs_times);
}

LogPostFn make_target(std::shared_ptr<const PosteriorProblem> problem,
                      double tolerance) {
  return [problem, tolerance](std::span<const double> theta) {
    const LogPosteriorEval e = problem->log_posterior(theta, tolerance);
    LogPostValue v;
    v.value = e.value;
    v.forward_evaluated = e.forward_evaluated;
    if (e.forward_evaluated) {
      v.k0_hat = e.forward.k0_hat;
      v.adaptations = e.forward.adaptations;
      v.tolerance_met = e.forward.tolerance_met;
    }
    return v;
  };
}

}  // namespace

Dataset generate_synthetic(const ExperimentConfig& config) {
  config.validate();
  const auto exact = make_exact_evaluator(config);
  const ForwardResult f = exact->evaluate(config.theta_true, 0.0);
  RandomStream rng(config.seed);
  Dataset data{f.values, config.locations()};
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    data.y[i] += config.sigma * rng.normal();
  }
  data.validate();
  return data;
}

ComparisonReport compare_traces(const Trace& a, const Trace& b, int bins) {
  if (a.dim != b.dim || a.dim == 0) {
    throw std::invalid_argument("compare_traces: dimension mismatch");
  }
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("compare_traces: empty trace");
  }
  if (bins < 1) throw std::invalid_argument("compare_traces: bins must be >= 1");

  const std::vector<double> map_a = map_estimate(a);
  const std::vector<double> map_b = map_estimate(b);

  ComparisonReport report;
  report.bins = bins;
  for (std::size_t j = 0; j < a.dim; ++j) {
    double lo = kInf;
    double hi = -kInf;
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = a.component(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean_a += v;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double v = b.component(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean_b += v;
    }
    mean_a /= static_cast<double>(a.size());
    mean_b /= static_cast<double>(b.size());

    double var_a = 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a.component(i, j) - mean_a;
      var_a += d * d;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double d = b.component(i, j) - mean_b;
      var_b += d * d;
    }
    var_a /= static_cast<double>(a.size());
    var_b /= static_cast<double>(b.size());
    const double pooled_sd = std::sqrt(0.5 * (var_a + var_b));

    MarginalComparison mc;
    const double width = (hi - lo) / bins;
    if (width > 0.0) {
      std::vector<double> pa(static_cast<std::size_t>(bins), 0.0);
      std::vector<double> pb(static_cast<std::size_t>(bins), 0.0);
      const auto bin_of = [&](double v) {
        const int k = static_cast<int>((v - lo) / width);
        return static_cast<std::size_t>(std::clamp(k, 0, bins - 1));
      };
      for (std::size_t i = 0; i < a.size(); ++i) {
        pa[bin_of(a.component(i, j))] += 1.0 / static_cast<double>(a.size());
      }
      for (std::size_t i = 0; i < b.size(); ++i) {
        pb[bin_of(b.component(i, j))] += 1.0 / static_cast<double>(b.size());
      }
      double tv = 0.0;
      for (int k = 0; k < bins; ++k) {
        tv += std::abs(pa[static_cast<std::size_t>(k)] -
                       pb[static_cast<std::size_t>(k)]);
      }
      mc.tv = 0.5 * tv;
    }
    const auto delta_in_sd = [&](double delta) {
      if (pooled_sd > 0.0) return std::abs(delta) / pooled_sd;
      return std::abs(delta) > 0.0 ? kInf : 0.0;
    };
    mc.mean_delta_sd = delta_in_sd(mean_a - mean_b);
    mc.map_delta_sd = delta_in_sd(map_a[j] - map_b[j]);
    report.marginals.push_back(mc);
  }
  return report;
}

Trace run_posterior_chain(const ExperimentConfig& config, const Dataset& data,
                          SolveMode mode, double tolerance,
                          double calibrated_k0) {
  config.validate();
  data.validate();
  if (config.problem == ProblemKind::burgers && !(calibrated_k0 > 0.0)) {
    throw std::invalid_argument(
        "run_posterior_chain: Burgers requires a calibrated error constant");
  }
  SamplerConfig sc;
  sc.iterations = config.iterations;
  sc.burn_in = config.effective_burn_in();
  sc.seed = config.seed + 1;
  sc.initial = config.initial.empty() ? config.theta_true : config.initial;
  sc.initial_scales = config.initial_scales.empty()
                          ? std::vector<double>(sc.initial.size(), 0.1)
                          : config.initial_scales;
  sc.transforms = ComponentTransform::for_prior(config.prior);
  sc.target_accept = config.target_accept;

  auto evaluator = make_numerical_evaluator(config, mode, calibrated_k0);
  auto problem = std::make_shared<PosteriorProblem>(
      data, config.precision, NoiseModel::fixed(config.sigma), config.prior,
      evaluator);
  return run_chain(make_target(problem, tolerance), sc);
}

BurgersCalibration burgers_calibration(const ExperimentConfig& config) {
  if (config.problem != ProblemKind::burgers) {
    throw std::invalid_argument(
        "burgers_calibration: config is not a Burgers problem");
  }
  if (config.solver.calibrated_k0 > 0.0) {
    BurgersCalibration cal;
    cal.k0_obs = config.solver.calibrated_k0;
    cal.z1 = config.solver.z1;
    cal.t_end = config.obs_times.empty() ? 0.0 : config.obs_times.back();
    return cal;
  }
  const BurgersParams true_params{
      config.solver.u_left, config.solver.u_left - config.theta_true[0],
      config.theta_true[1], config.solver.viscosity};
  return calibrate_error_model(true_params, config.solver.calibration_grids,
                               config.solver.z1, config.obs_times,
                               config.obs_times.back());
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const Dataset& data) {
  config.validate();
  data.validate();

  ExperimentResult result;
  result.data = data;
  result.data_seed = config.seed;
  result.chain_seed = config.seed + 1;

  const PrecisionMatrices precision =
      build_precision(config.precision, data.locations);
  const double s_star = config.sigma;  // fixed noise level
  result.bound = admissible_k0(static_cast<std::size_t>(data.y.size()), s_star,
                               correlation_factor(precision),
                               config.target_eabf);
  result.tolerance = config.solver.tolerance_override > 0.0
                         ? config.solver.tolerance_override
                         : result.bound.k0_admissible;

  if (config.problem == ProblemKind::burgers) {
    const BurgersCalibration cal = burgers_calibration(config);
    // The controller consumes the direct observation-error constant; the
    // ratio fits are recorded alongside it but underpredict the true
    // observation error here by more than an order of magnitude.
    result.calibrated_k0 = cal.k0_obs;
    if (!config.out_dir.empty() && !cal.points.empty()) {
      std::filesystem::create_directories(config.out_dir);
      write_calibration_json(config.out_dir / "calibration.json", cal);
    }
  }

  result.fine = run_posterior_chain(config, data, SolveMode::fixed,
                                    result.tolerance, result.calibrated_k0);
  result.adaptive = run_posterior_chain(config, data, SolveMode::adaptive,
                                        result.tolerance,
                                        result.calibrated_k0);

  result.report = compare_traces(result.fine, result.adaptive);
  result.report.wall_ratio =
      result.fine.wall_seconds > 0.0
          ? result.adaptive.wall_seconds / result.fine.wall_seconds
          : 0.0;
  result.report.tolerance_used = result.tolerance;
  result.report.bound = result.bound;
  result.report.fine_bound_violating = result.fine.solver.unmet_rate() > 0.01;
  result.report.adaptive_bound_violating =
      result.adaptive.solver.unmet_rate() > 0.01;
  result.bound_violating = result.report.fine_bound_violating ||
                           result.report.adaptive_bound_violating;

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    save_experiment_config(config.out_dir / "config.json", config);
    write_dataset_json(config.out_dir / "dataset.json", data, config);
    write_tolerance_json(config.out_dir / "tolerance.json", result.bound);
    write_trace_csv(config.out_dir / "trace_fine.csv", result.fine);
    write_trace_csv(config.out_dir / "trace_adaptive.csv", result.adaptive);
    write_chain_summary_json(config.out_dir / "summary_fine.json",
                             result.fine, result.chain_seed,
                             result.tolerance);
    write_chain_summary_json(config.out_dir / "summary_adaptive.json",
                             result.adaptive, result.chain_seed,
                             result.tolerance);
    write_comparison_json(config.out_dir / "comparison.json", result.report);
    write_histograms_csv(config.out_dir / "histograms.csv", result.fine,
                         result.adaptive, result.report.bins);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, generate_synthetic(config));
}

ExperimentConfig reference_logistic_config() {
  ExperimentConfig c;
  c.problem = ProblemKind::logistic;
  c.theta_true = {1.0, 1000.0};
  c.sigma = 30.0;
  c.x0 = 100.0;
  c.obs_times.resize(26);
  for (int i = 0; i < 26; ++i) c.obs_times[static_cast<std::size_t>(i)] = 10.0 * i / 25.0;
  c.prior.components = {PriorComponent::uniform(0.01, 4.0),
                        PriorComponent::uniform(100.0, 5000.0)};
  c.precision = PrecisionSpec{};
  c.target_eabf = 0.05;
  c.seed = 20170829;
  c.iterations = 40000;
  c.solver.fine_h = 0.005;
  c.solver.h_init = 0.1;
  return c;
}

ExperimentConfig reference_burgers_config() {
  ExperimentConfig c;
  c.problem = ProblemKind::burgers;
  c.theta_true = {1.0, 1.0};  // jump u_left - u_right, z0
  c.sigma = 0.0115;
  c.obs_times = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  c.prior.components = {PriorComponent::uniform(0.1, 4.0),
                        PriorComponent::uniform(0.1, 3.9)};
  c.precision = PrecisionSpec{};
  c.target_eabf = 0.05;
  c.seed = 20170829;
  c.iterations = 20000;
  c.solver.u_left = 2.0;
  c.solver.viscosity = 0.05;
  c.solver.z1 = 2.0;
  c.solver.cfl = 0.1;
  c.solver.fine_n = 512;
  c.solver.n_start = 128;
  c.solver.n_max = 512;
  return c;
}

}  // namespace eabf
