// SPDX-License-Identifier: Apache-2.0
#include "eabf/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eabf {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

double burgers_flux(double u) { return 0.5 * u * u; }

// Linear interpolation of cell averages between the two bracketing cell
// centers; clamped one-sided within half a cell of the walls.
double observe_at(std::span<const double> u, const Grid1D& grid, double z1) {
  const int n = static_cast<int>(u.size());
  const double x = (z1 - grid.z_lo) / grid.dz() - 0.5;
  int j = static_cast<int>(std::floor(x));
  j = std::clamp(j, 0, n - 2);
  const double w = std::clamp(x - j, 0.0, 1.0);
  return (1.0 - w) * u[static_cast<std::size_t>(j)] +
         w * u[static_cast<std::size_t>(j + 1)];
}

std::vector<double> step_cell_averages(const BurgersParams& params,
                                       const Grid1D& grid) {
  std::vector<double> u(static_cast<std::size_t>(grid.n_cells));
  const double dz = grid.dz();
  for (int i = 0; i < grid.n_cells; ++i) {
    const double zl = grid.z_lo + i * dz;
    const double zr = zl + dz;
    double v;
    if (zr <= params.z0) {
      v = params.u_left;
    } else if (zl >= params.z0) {
      v = params.u_right;
    } else {
      v = (params.u_left * (params.z0 - zl) +
           params.u_right * (zr - params.z0)) /
          dz;
    }
    u[static_cast<std::size_t>(i)] = v;
  }
  return u;
}

double total_variation(std::span<const double> u) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    tv += std::abs(u[i + 1] - u[i]);
  }
  return tv;
}

}  // namespace

Grid1D Grid1D::uniform(int n, double lo, double hi) {
  if (!power_of_two(n) || n < 4) {
    throw std::invalid_argument("Grid1D: n must be a power of two >= 4");
  }
  if (!(hi > lo)) throw std::invalid_argument("Grid1D: needs z_hi > z_lo");
  return Grid1D{lo, hi, n};
}

double cfl_dt(std::span<const double> u, double dz, double c) {
  if (u.empty()) throw std::invalid_argument("cfl_dt: empty state");
  if (!(dz > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument("cfl_dt: dz and c must be > 0");
  }
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  if (umax == 0.0) {
    throw std::invalid_argument("cfl_dt: all-zero state has no CFL step");
  }
  return c * dz / umax;
}

void fv_advective_step(std::vector<double>& u, double dz, double dt) {
  const std::size_t n = u.size();
  if (n < 2) throw std::invalid_argument("fv_advective_step: needs >= 2 cells");
  if (!(dz > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("fv_advective_step: dz and dt must be > 0");
  }
  // Extended state with two zero-gradient ghost cells per side.
  std::vector<double> ue(n + 4);
  ue[0] = ue[1] = u[0];
  std::copy(u.begin(), u.end(), ue.begin() + 2);
  ue[n + 2] = ue[n + 3] = u[n - 1];

  // Minmod slopes and half-step predictor on cells 1..n+2.
  std::vector<double> slope(n + 4, 0.0);
  std::vector<double> mid(n + 4);
  for (std::size_t i = 1; i <= n + 2; ++i) {
    slope[i] = minmod(ue[i] - ue[i - 1], ue[i + 1] - ue[i]);
    const double fl = burgers_flux(ue[i] - 0.5 * slope[i]);
    const double fr = burgers_flux(ue[i] + 0.5 * slope[i]);
    mid[i] = ue[i] - 0.5 * dt / dz * (fr - fl);
  }

  // Local Lax-Friedrichs flux at interface k between cells k+1 and k+2.
  std::vector<double> flux(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double ul = mid[k + 1] + 0.5 * slope[k + 1];
    const double ur = mid[k + 2] - 0.5 * slope[k + 2];
    const double a = std::max(std::abs(ul), std::abs(ur));
    flux[k] = 0.5 * (burgers_flux(ul) + burgers_flux(ur)) -
              0.5 * a * (ur - ul);
  }
  for (std::size_t j = 0; j < n; ++j) {
    u[j] = ue[j + 2] - dt / dz * (flux[j + 1] - flux[j]);
  }
}

void fv_viscous_step(std::vector<double>& u, double dz, double dt,
                     double epsilon) {
  const std::size_t n = u.size();
  if (n < 2) throw std::invalid_argument("fv_viscous_step: needs >= 2 cells");
  if (!(dz > 0.0) || !(dt > 0.0) || !(epsilon >= 0.0)) {
    throw std::invalid_argument("fv_viscous_step: invalid dz, dt or epsilon");
  }
  if (epsilon == 0.0) return;
  const double mu = 0.5 * epsilon * dt / (dz * dz);

  // rhs = (I + mu L) u with Neumann closure.
  std::vector<double> rhs(n);
  rhs[0] = u[0] + mu * (u[1] - u[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    rhs[i] = u[i] + mu * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
  }
  rhs[n - 1] = u[n - 1] + mu * (u[n - 2] - u[n - 1]);

  // Thomas solve of (I - mu L) u_next = rhs; diagonal 1 + 2mu in the
  // interior, 1 + mu at the Neumann walls, off-diagonals -mu.
  std::vector<double> c_prime(n);
  std::vector<double> d_prime(n);
  double diag0 = 1.0 + mu;
  c_prime[0] = -mu / diag0;
  d_prime[0] = rhs[0] / diag0;
  for (std::size_t i = 1; i < n; ++i) {
    const double diag = (i + 1 == n) ? 1.0 + mu : 1.0 + 2.0 * mu;
    const double denom = diag + mu * c_prime[i - 1];
    c_prime[i] = -mu / denom;
    d_prime[i] = (rhs[i] + mu * d_prime[i - 1]) / denom;
  }
  u[n - 1] = d_prime[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    u[i] = d_prime[i] - c_prime[i] * u[i + 1];
  }
}

void fv_step(std::vector<double>& u, double dz, double dt, double epsilon) {
  fv_viscous_step(u, dz, 0.5 * dt, epsilon);
  fv_advective_step(u, dz, dt);
  fv_viscous_step(u, dz, 0.5 * dt, epsilon);
  for (double v : u) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("fv_step: non-finite cell value (N=" +
                               std::to_string(u.size()) + ")");
    }
  }
}

PdeSolverResult solve_burgers(const BurgersParams& params, const Grid1D& grid,
                              double z1, std::span<const double> obs_times,
                              BurgersHistory* history, double cfl) {
  if (!(params.u_left > params.u_right)) {
    throw std::invalid_argument("solve_burgers: requires u_left > u_right");
  }
  if (!(params.viscosity > 0.0)) {
    throw std::invalid_argument("solve_burgers: viscosity must be > 0");
  }
  if (!(params.z0 > grid.z_lo) || !(params.z0 < grid.z_hi)) {
    throw std::invalid_argument("solve_burgers: z0 outside the domain");
  }
  if (!(z1 > grid.z_lo) || !(z1 < grid.z_hi)) {
    throw std::invalid_argument("solve_burgers: z1 outside the domain");
  }
  for (std::size_t i = 0; i < obs_times.size(); ++i) {
    if (obs_times[i] < 0.0 || (i > 0 && obs_times[i] < obs_times[i - 1])) {
      throw std::invalid_argument(
          "solve_burgers: obs_times must be nondecreasing and >= 0");
    }
  }

  const double dz = grid.dz();
  std::vector<double> u = step_cell_averages(params, grid);
  if (history != nullptr) {
    history->times.assign(1, 0.0);
    history->states.assign(1, u);
    history->viscosity = params.viscosity;
  }

  PdeSolverResult out;
  out.n_used = grid.n_cells;
  out.u_at_obs.reserve(obs_times.size());

  double t = 0.0;
  std::size_t next_obs = 0;
  while (next_obs < obs_times.size() && obs_times[next_obs] <= t) {
    out.u_at_obs.push_back(observe_at(u, grid, z1));
    ++next_obs;
  }
  while (next_obs < obs_times.size()) {
    const double target = obs_times[next_obs];
    while (t < target) {
      double dt = cfl_dt(u, dz, cfl);
      dt = std::min(dt, target - t);
      if (target - t - dt < 1e-9 * dz) dt = target - t;
      try {
        fv_step(u, dz, dt, params.viscosity);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " at t=" +
                                 std::to_string(t));
      }
      ++out.n_steps;
      t = (dt == target - t) ? target : t + dt;
      if (history != nullptr) {
        history->times.push_back(t);
        history->states.push_back(u);
      }
    }
    while (next_obs < obs_times.size() && obs_times[next_obs] <= t) {
      out.u_at_obs.push_back(observe_at(u, grid, z1));
      ++next_obs;
    }
  }
  return out;
}

double residue_l1(const BurgersHistory& history, const Grid1D& grid,
                  double t_end) {
  if (history.states.size() < 2) {
    throw std::invalid_argument("residue_l1: needs at least 2 time levels");
  }
  const std::size_t n = history.states[0].size();
  if (n != static_cast<std::size_t>(grid.n_cells)) {
    throw std::invalid_argument("residue_l1: history does not match grid");
  }
  const double dz = grid.dz();
  const double eps = history.viscosity;
  double total = 0.0;
  for (std::size_t lev = 0; lev + 1 < history.times.size(); ++lev) {
    if (history.times[lev + 1] > t_end * (1.0 + 1e-12)) break;
    const double dt = history.times[lev + 1] - history.times[lev];
    if (!(dt > 0.0)) {
      throw std::invalid_argument("residue_l1: nonincreasing history times");
    }
    const auto& cur = history.states[lev];
    const auto& nxt = history.states[lev + 1];
    for (std::size_t i = 0; i < n; ++i) {
      const double um = (i == 0) ? cur[0] : cur[i - 1];
      const double up = (i + 1 == n) ? cur[n - 1] : cur[i + 1];
      const double dudt = (nxt[i] - cur[i]) / dt;
      const double conv = cur[i] * (up - um) / (2.0 * dz);
      const double diff = eps * (up - 2.0 * cur[i] + um) / (dz * dz);
      total += std::abs(dudt + conv - diff) * dz * dt;
    }
  }
  return total;
}

double cockburn_phi(const BurgersHistory& history, std::span<const double> v0,
                    const Grid1D& grid, double t_end, double epsilon) {
  if (history.states.size() < 2) {
    throw std::invalid_argument("cockburn_phi: needs at least 2 time levels");
  }
  const std::size_t n = history.states[0].size();
  if (n != static_cast<std::size_t>(grid.n_cells) || v0.size() != n) {
    throw std::invalid_argument("cockburn_phi: dimension mismatch");
  }
  const double dz = grid.dz();
  double initial_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    initial_term += std::abs(history.states[0][i] - v0[i]) * dz;
  }
  // Piecewise-constant quadrature of the TV norms over the stored steps.
  double tv_max = 0.0;
  double tv_l1 = 0.0;
  for (std::size_t lev = 0; lev < history.times.size(); ++lev) {
    if (history.times[lev] > t_end * (1.0 + 1e-12)) break;
    const double tv = total_variation(history.states[lev]);
    tv_max = std::max(tv_max, tv);
    if (lev + 1 < history.times.size() &&
        history.times[lev + 1] <= t_end * (1.0 + 1e-12)) {
      tv_l1 += tv * (history.times[lev + 1] - history.times[lev]);
    }
  }
  const double c = std::sqrt(8.0 * tv_max * tv_l1);
  return initial_term + residue_l1(history, grid, t_end) +
         c * std::sqrt(epsilon);
}

double fit_ratio_constant(std::span<const double> x,
                          std::span<const double> r) {
  if (x.size() != r.size() || x.size() < 2) {
    throw std::invalid_argument("fit_ratio_constant: needs >= 2 points");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (r[i] - 1.0) * x[i];
    den += x[i] * x[i];
  }
  if (den == 0.0) {
    throw std::invalid_argument("fit_ratio_constant: degenerate regressor");
  }
  return num / den;
}

BurgersCalibration calibrate_error_model(const BurgersParams& params,
                                         std::span<const int> grids,
                                         double z1,
                                         std::span<const double> obs_times,
                                         double t_end) {
  if (grids.size() < 2) {
    throw std::invalid_argument("calibrate_error_model: needs >= 2 grids");
  }
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("calibrate_error_model: t_end must be > 0");
  }
  BurgersCalibration cal;
  cal.t_end = t_end;
  cal.z1 = z1;

  // The solve must reach t_end for the error functional even when the last
  // observation falls earlier.
  std::vector<double> times(obs_times.begin(), obs_times.end());
  if (times.empty() || times.back() < t_end) times.push_back(t_end);

  std::vector<double> growth_x;
  std::vector<double> dz2_x;
  std::vector<double> ratios;
  for (int n : grids) {
    const Grid1D grid = Grid1D::uniform(n);
    BurgersHistory history;
    const PdeSolverResult res =
        solve_burgers(params, grid, z1, times, &history);

    RatioFitPoint pt;
    pt.n_cells = n;
    pt.dz = grid.dz();
    const std::vector<double> v0 = step_cell_averages(params, grid);
    pt.phi = cockburn_phi(history, v0, grid, t_end, params.viscosity);

    const auto& final_state = history.states.back();
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      err += std::abs(final_state[static_cast<std::size_t>(i)] -
                      burgers_exact(grid.center(i), t_end, params)) *
             pt.dz;
    }
    pt.err_l1 = err;
    pt.ratio = pt.phi / pt.err_l1;

    for (std::size_t j = 0; j < obs_times.size(); ++j) {
      const double exact = burgers_exact(z1, obs_times[j], params);
      pt.err_obs_max =
          std::max(pt.err_obs_max, std::abs(res.u_at_obs[j] - exact));
    }
    cal.k0_obs = std::max(cal.k0_obs, pt.err_obs_max / (pt.dz * pt.dz));

    growth_x.push_back(1.0 / (pt.dz * pt.dz));
    dz2_x.push_back(pt.dz * pt.dz);
    ratios.push_back(pt.ratio);
    cal.points.push_back(pt);
  }
  cal.k0_ratio_growth = fit_ratio_constant(growth_x, ratios);
  cal.k0_ratio_dz2 = fit_ratio_constant(dz2_x, ratios);
  return cal;
}

double estimate_k0_via_ratio(const BurgersParams& params,
                             std::span<const int> grids, double t_end) {
  const BurgersCalibration cal =
      calibrate_error_model(params, grids, 0.5 * (params.z0 + 4.0), {}, t_end);
  return cal.k0_ratio_growth;
}

PdeSolverResult adaptive_grid_solve(const BurgersParams& params,
                                    double calibrated_k0, double z1,
                                    std::span<const double> obs_times,
                                    double tolerance, int n_start, int n_max,
                                    double cfl) {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("adaptive_grid_solve: tolerance must be > 0");
  }
  if (!(calibrated_k0 >= 0.0)) {
    throw std::invalid_argument("adaptive_grid_solve: calibrated_k0 < 0");
  }
  if (!power_of_two(n_start) || n_max < n_start) {
    throw std::invalid_argument("adaptive_grid_solve: bad grid range");
  }
  // The error model is a priori, so the grid is selected before solving;
  // intermediate solves would inform nothing.
  Grid1D grid = Grid1D::uniform(n_start);
  int doublings = 0;
  while (calibrated_k0 * grid.dz() * grid.dz() > tolerance &&
         2 * grid.n_cells <= n_max) {
    grid = Grid1D::uniform(2 * grid.n_cells);
    ++doublings;
  }
  PdeSolverResult res = solve_burgers(params, grid, z1, obs_times, nullptr, cfl);
  res.k0_hat = calibrated_k0 * grid.dz() * grid.dz();
  res.n_doublings = doublings;
  res.tolerance_met = res.k0_hat <= tolerance;
  return res;
}

}  // namespace eabf
