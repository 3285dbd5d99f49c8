// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <vector>

#include "eabf/bound.hpp"
#include "eabf/exact.hpp"
#include "eabf/experiments.hpp"
#include "eabf/sampler.hpp"

namespace {

eabf::ExperimentConfig tiny_logistic(long long iterations = 400) {
  eabf::ExperimentConfig c = eabf::reference_logistic_config();
  c.iterations = iterations;
  c.burn_in = iterations / 5;
  return c;
}

eabf::ExperimentConfig tiny_burgers(long long iterations = 300) {
  eabf::ExperimentConfig c = eabf::reference_burgers_config();
  c.iterations = iterations;
  c.burn_in = iterations / 5;
  // Preset constant: skips the multi-grid calibration in cheap tests.
  c.solver.calibrated_k0 = 5.46614874;
  return c;
}

eabf::Trace trace_from(std::vector<double> samples) {
  eabf::Trace t;
  t.dim = 1;
  t.log_posts.assign(samples.size(), 0.0);
  t.samples = std::move(samples);
  return t;
}

}  // namespace

TEST_CASE("synthetic logistic data stays within five noise sds of truth") {
  const eabf::ExperimentConfig cfg = eabf::reference_logistic_config();
  const eabf::Dataset data = eabf::generate_synthetic(cfg);
  REQUIRE(data.y.size() == 26);
  const eabf::LogisticParams p{cfg.theta_true[0], cfg.theta_true[1], cfg.x0};
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    const double f = eabf::logistic_exact(cfg.obs_times[i], p);
    CHECK(std::abs(data.y[i] - f) <= 5.0 * cfg.sigma);
  }
}

TEST_CASE("synthetic burgers data stays within five noise sds of truth") {
  const eabf::ExperimentConfig cfg = eabf::reference_burgers_config();
  const eabf::Dataset data = eabf::generate_synthetic(cfg);
  REQUIRE(data.y.size() == cfg.obs_times.size());
  eabf::BurgersParams p;
  p.u_left = cfg.solver.u_left;
  p.u_right = cfg.solver.u_left - cfg.theta_true[0];
  p.z0 = cfg.theta_true[1];
  p.viscosity = cfg.solver.viscosity;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    const double f = eabf::burgers_exact(cfg.solver.z1, cfg.obs_times[i], p);
    CHECK(std::abs(data.y[i] - f) <= 5.0 * cfg.sigma);
  }
}

TEST_CASE("data generation is seed-deterministic and seed-isolated") {
  const eabf::ExperimentConfig cfg = eabf::reference_logistic_config();
  const eabf::Dataset a = eabf::generate_synthetic(cfg);
  const eabf::Dataset b = eabf::generate_synthetic(cfg);
  CHECK(a.y == b.y);
  eabf::ExperimentConfig other = cfg;
  other.seed = cfg.seed + 1;
  const eabf::Dataset c = eabf::generate_synthetic(other);
  CHECK(a.y != c.y);
}

TEST_CASE("identical traces compare at exactly zero distance") {
  eabf::RandomStream rng(31);
  std::vector<double> s(5000);
  for (double& v : s) v = rng.normal();
  const eabf::Trace t = trace_from(s);
  const eabf::ComparisonReport r = eabf::compare_traces(t, t, 50);
  REQUIRE(r.marginals.size() == 1);
  CHECK(r.marginals[0].tv == 0.0);
  CHECK(r.marginals[0].mean_delta_sd == 0.0);
  CHECK(r.marginals[0].map_delta_sd == 0.0);
  CHECK(r.bins == 50);
}

TEST_CASE("disjoint traces compare at nearly full distance") {
  eabf::RandomStream rng(33);
  std::vector<double> lo(2000), hi(2000);
  for (double& v : lo) v = rng.uniform();
  for (double& v : hi) v = 10.0 + rng.uniform();
  const eabf::ComparisonReport r =
      eabf::compare_traces(trace_from(lo), trace_from(hi), 50);
  CHECK(r.marginals[0].tv >= 0.95);
  CHECK(r.marginals[0].mean_delta_sd >= 5.0);
}

TEST_CASE("independent draws from one law sit under the binning noise floor") {
  eabf::RandomStream ra(41), rb(42);
  std::vector<double> a(10000), b(10000);
  for (double& v : a) v = ra.normal();
  for (double& v : b) v = rb.normal();
  const eabf::ComparisonReport r =
      eabf::compare_traces(trace_from(a), trace_from(b), 50);
  CHECK(r.marginals[0].tv <= 0.08);
  CHECK(r.marginals[0].mean_delta_sd <= 0.1);
}

TEST_CASE("a unit mean shift reads as one pooled sd") {
  eabf::RandomStream ra(51), rb(52);
  std::vector<double> a(10000), b(10000);
  for (double& v : a) v = ra.normal();
  for (double& v : b) v = 1.0 + rb.normal();
  const eabf::ComparisonReport r =
      eabf::compare_traces(trace_from(a), trace_from(b), 50);
  CHECK(r.marginals[0].mean_delta_sd == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("trace comparison validates shapes") {
  eabf::Trace a = trace_from({1.0, 2.0, 3.0});
  eabf::Trace two;
  two.dim = 2;
  two.samples = {1.0, 2.0};
  two.log_posts = {0.0};
  CHECK_THROWS_AS(eabf::compare_traces(a, two, 50), std::invalid_argument);
  eabf::Trace empty;
  empty.dim = 1;
  CHECK_THROWS_AS(eabf::compare_traces(a, empty, 50), std::invalid_argument);
  CHECK_THROWS_AS(eabf::compare_traces(a, a, 0), std::invalid_argument);
}

TEST_CASE("experiment configs validate their invariants") {
  eabf::ExperimentConfig c = tiny_logistic();
  CHECK_NOTHROW(c.validate());
  c.burn_in = c.iterations + 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_logistic();
  c.theta_true.clear();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_logistic();
  c.obs_times.clear();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_logistic();
  c.sigma = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_logistic();
  c.target_eabf = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("observation locations carry the problem geometry") {
  const eabf::ExperimentConfig lg = eabf::reference_logistic_config();
  const eabf::Locations ll = lg.locations();
  CHECK(ll.dim() == 1);
  CHECK(ll.size() == 26);
  const eabf::ExperimentConfig bg = eabf::reference_burgers_config();
  const eabf::Locations bl = bg.locations();
  CHECK(bl.dim() == 2);
  CHECK(bl.size() == bg.obs_times.size());
  CHECK(bl.point(0)[0] == bg.solver.z1);
  CHECK(bl.point(0)[1] == bg.obs_times[0]);
}

TEST_CASE("solver tolerance is exactly the admissible bound output") {
  const eabf::ExperimentConfig cfg = tiny_logistic();
  const eabf::ExperimentResult res = eabf::run_experiment(cfg);
  const eabf::ToleranceReport want =
      eabf::admissible_k0(26, cfg.sigma, 1.0, cfg.target_eabf);
  CHECK(res.tolerance == want.k0_admissible);
  CHECK(res.bound.k0_admissible ==
        doctest::Approx(0.14461316969025003).epsilon(1e-14));
  CHECK(res.bound.k_constant ==
        doctest::Approx(0.12533141373155003).epsilon(1e-14));
  CHECK(res.report.tolerance_used == res.tolerance);
  CHECK(res.data_seed == cfg.seed);
  CHECK(res.chain_seed == cfg.seed + 1);
}

TEST_CASE("tolerance override replaces the bound-derived value") {
  eabf::ExperimentConfig cfg = tiny_logistic();
  cfg.solver.tolerance_override = 0.01;
  const eabf::ExperimentResult res = eabf::run_experiment(cfg);
  CHECK(res.tolerance == 0.01);
  // The report still records what the bound alone would admit.
  CHECK(res.bound.k0_admissible ==
        doctest::Approx(0.14461316969025003).epsilon(1e-14));
}

TEST_CASE("experiments are bitwise reproducible end to end") {
  const eabf::ExperimentConfig cfg = tiny_logistic();
  const eabf::ExperimentResult a = eabf::run_experiment(cfg);
  const eabf::ExperimentResult b = eabf::run_experiment(cfg);
  CHECK(a.data.y == b.data.y);
  CHECK(a.fine.samples == b.fine.samples);
  CHECK(a.adaptive.samples == b.adaptive.samples);
  CHECK(a.report.marginals[0].tv == b.report.marginals[0].tv);
  CHECK(a.report.marginals[1].tv == b.report.marginals[1].tv);
}

TEST_CASE("logistic legs agree within the bound's guarantee at small scale") {
  const eabf::ExperimentConfig cfg = tiny_logistic(2000);
  const eabf::ExperimentResult res = eabf::run_experiment(cfg);
  REQUIRE(res.report.marginals.size() == 2);
  // Short chains carry binning noise; the guarantee proper is exercised at
  // criterion scale. Both solvers met the tolerance everywhere, so the
  // shared proposal stream keeps the legs statistically close.
  for (const eabf::MarginalComparison& m : res.report.marginals) {
    CHECK(m.tv <= 0.35);
  }
  CHECK_FALSE(res.bound_violating);
  CHECK_FALSE(res.report.fine_bound_violating);
  CHECK_FALSE(res.report.adaptive_bound_violating);
  CHECK(res.fine.solver.n_tolerance_unmet == 0);
  CHECK(res.adaptive.solver.n_tolerance_unmet == 0);
}

TEST_CASE("burgers legs collapse onto the same exhausted grid") {
  const eabf::ExperimentConfig cfg = tiny_burgers();
  const eabf::ExperimentResult res = eabf::run_experiment(cfg);
  CHECK(res.calibrated_k0 == 5.46614874);
  CHECK(res.tolerance == doctest::Approx(2.402185e-4).epsilon(1e-4));
  // The admissible tolerance needs a finer grid than the ladder allows, so
  // both legs run the 512-cell solver on every evaluation: identical
  // forward maps under one proposal stream give identical chains.
  CHECK(res.fine.samples == res.adaptive.samples);
  REQUIRE(res.report.marginals.size() == 2);
  CHECK(res.report.marginals[0].tv == 0.0);
  CHECK(res.report.marginals[1].tv == 0.0);
  // Exhaustion is flagged honestly on both legs.
  CHECK(res.bound_violating);
  CHECK(res.report.fine_bound_violating);
  CHECK(res.report.adaptive_bound_violating);
  CHECK(res.fine.solver.unmet_rate() == 1.0);
  CHECK(res.adaptive.solver.unmet_rate() == 1.0);
}

TEST_CASE("low noise concentrates the posterior on the true parameters") {
  eabf::ExperimentConfig cfg = tiny_logistic(3000);
  cfg.sigma = 1.0;
  const eabf::ExperimentResult res = eabf::run_experiment(cfg);
  const std::vector<double> map = eabf::map_estimate(res.fine);
  CHECK(map[0] == doctest::Approx(cfg.theta_true[0]).epsilon(0.01));
  CHECK(map[1] == doctest::Approx(cfg.theta_true[1]).epsilon(0.01));
}

TEST_CASE("experiment artifacts land in the output directory") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "eabf_test_artifacts";
  fs::remove_all(dir);
  eabf::ExperimentConfig cfg = tiny_logistic(200);
  cfg.out_dir = dir;
  const eabf::ExperimentResult res = eabf::run_experiment(cfg);
  CHECK(res.fine.size() == 160);
  for (const char* name :
       {"config.json", "dataset.json", "tolerance.json", "trace_fine.csv",
        "trace_adaptive.csv", "summary_fine.json", "summary_adaptive.json",
        "comparison.json", "histograms.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / name), name);
  }
  fs::remove_all(dir);
}

TEST_CASE("burgers runs calibrate on the fly when no constant is preset") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "eabf_test_cal";
  fs::remove_all(dir);
  eabf::ExperimentConfig cfg = eabf::reference_burgers_config();
  cfg.iterations = 120;
  cfg.burn_in = 20;
  cfg.out_dir = dir;
  // Two cheap grids keep the on-the-fly calibration fast; the constant they
  // produce is the max observed err / dz^2 over the pair.
  cfg.solver.calibration_grids = {64, 128};
  const eabf::ExperimentResult res = eabf::run_experiment(cfg);
  CHECK(res.calibrated_k0 == doctest::Approx(5.390376).epsilon(1e-4));
  CHECK(fs::exists(dir / "calibration.json"));
  fs::remove_all(dir);
}
