// SPDX-License-Identifier: Apache-2.0
// Hot-path benchmarks: integrator step, full fixed/adaptive solves, the
// finite-volume kernel, and one posterior chain iteration.
#include <benchmark/benchmark.h>

#include <vector>

#include "eabf/burgers.hpp"
#include "eabf/exact.hpp"
#include "eabf/experiments.hpp"
#include "eabf/ode.hpp"

namespace {

using namespace eabf;

const OdeRhs& logistic_rhs() {
  static const OdeRhs rhs{[](double, std::span<const double> u,
                             std::span<double> dudt) {
    dudt[0] = u[0] * (1.0 - u[0] / 1000.0);
  }};
  return rhs;
}

void bm_ck45_step(benchmark::State& state) {
  std::vector<double> u{100.0};
  std::vector<double> hi(1);
  std::vector<double> lo(1);
  for (auto _ : state) {
    ck45_step(logistic_rhs(), 0.0, u, 0.1, hi, lo);
    benchmark::DoNotOptimize(hi[0]);
  }
}
BENCHMARK(bm_ck45_step);

void bm_integrate_fixed(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const std::vector<double> u0{100.0};
  const std::vector<double> obs{2.0, 4.0, 6.0, 8.0, 10.0};
  for (auto _ : state) {
    auto res = integrate_fixed(logistic_rhs(), u0, 0.0, 10.0, obs, h);
    benchmark::DoNotOptimize(res.values[0]);
  }
}
BENCHMARK(bm_integrate_fixed)->Arg(10)->Arg(200);

void bm_adaptive_solve(benchmark::State& state) {
  const std::vector<double> u0{100.0};
  const std::vector<double> obs{2.0, 4.0, 6.0, 8.0, 10.0};
  for (auto _ : state) {
    auto res = adaptive_solve(logistic_rhs(), u0, 0.0, 10.0, obs, 0.1446,
                              0.1, 20);
    benchmark::DoNotOptimize(res.k0_hat);
  }
}
BENCHMARK(bm_adaptive_solve);

void bm_fv_step(benchmark::State& state) {
  const auto grid = Grid1D::uniform(static_cast<int>(state.range(0)));
  const BurgersParams params;
  std::vector<double> u(static_cast<std::size_t>(grid.n_cells));
  for (int i = 0; i < grid.n_cells; ++i) {
    u[static_cast<std::size_t>(i)] =
        burgers_exact(grid.center(i), 0.1, params);
  }
  const double dt = cfl_dt(u, grid.dz());
  for (auto _ : state) {
    std::vector<double> w = u;
    fv_step(w, grid.dz(), dt, params.viscosity);
    benchmark::DoNotOptimize(w[0]);
  }
}
BENCHMARK(bm_fv_step)->Arg(128)->Arg(512);

void bm_solve_burgers(benchmark::State& state) {
  const auto grid = Grid1D::uniform(static_cast<int>(state.range(0)));
  const BurgersParams params;
  const std::vector<double> obs{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  for (auto _ : state) {
    auto res = solve_burgers(params, grid, 2.0, obs);
    benchmark::DoNotOptimize(res.u_at_obs[0]);
  }
}
BENCHMARK(bm_solve_burgers)->Arg(128)->Arg(256);

void bm_chain_iteration(benchmark::State& state) {
  auto config = reference_logistic_config();
  config.iterations = 64;
  config.burn_in = 0;
  const Dataset data = generate_synthetic(config);
  for (auto _ : state) {
    auto trace = run_posterior_chain(config, data, SolveMode::adaptive,
                                     0.1446);
    benchmark::DoNotOptimize(trace.acceptance_rate);
  }
  state.SetItemsProcessed(state.iterations() * config.iterations);
}
BENCHMARK(bm_chain_iteration);

}  // namespace

BENCHMARK_MAIN();
