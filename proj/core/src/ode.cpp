// SPDX-License-Identifier: Apache-2.0
#include "eabf/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eabf {

void ButcherTableau::validate() const {
  if (stages < 2) throw std::invalid_argument("ButcherTableau: stages < 2");
  const auto s = static_cast<std::size_t>(stages);
  if (a.size() != s || b.size() != s || b_hat.size() != s || c.size() != s) {
    throw std::invalid_argument("ButcherTableau: size mismatch");
  }
  double sum_b = 0.0;
  double sum_bh = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    if (a[i].size() != i) {
      throw std::invalid_argument(
          "ButcherTableau: a must be strictly lower triangular");
    }
    double row = 0.0;
    for (double v : a[i]) row += v;
    if (std::abs(row - c[i]) > 1e-14) {
      throw std::invalid_argument("ButcherTableau: c_i != sum_j a_ij");
    }
    sum_b += b[i];
    sum_bh += b_hat[i];
  }
  if (std::abs(sum_b - 1.0) > 1e-14 || std::abs(sum_bh - 1.0) > 1e-14) {
    throw std::invalid_argument("ButcherTableau: weights must sum to 1");
  }
}

const ButcherTableau& ButcherTableau::cash_karp() {
  static const ButcherTableau tab = [] {
    ButcherTableau t;
    t.stages = 6;
    t.a = {{},
           {1.0 / 5.0},
           {3.0 / 40.0, 9.0 / 40.0},
           {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0},
           {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0},
           {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0,
            44275.0 / 110592.0, 253.0 / 4096.0}};
    t.b = {37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0,
           512.0 / 1771.0};
    t.b_hat = {2825.0 / 27648.0, 0.0, 18575.0 / 48384.0, 13525.0 / 55296.0,
               277.0 / 14336.0, 1.0 / 4.0};
    t.c = {0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0};
    t.validate();
    return t;
  }();
  return tab;
}

namespace {

// Reusable stage storage so the stepping loop performs no allocations.
// Emitting increments rather than updated states lets the caller both
// accumulate the state with compensated summation and form the local error
// h * sum_s (b_s - b_hat_s) k_s free of large-magnitude cancellation.
struct Stepper {
  const OdeRhs& rhs;
  std::size_t dim;
  std::vector<std::vector<double>> k;
  std::vector<double> stage;

  Stepper(const OdeRhs& r, std::size_t d)
      : rhs(r), dim(d), k(6, std::vector<double>(d)), stage(d) {}

  void step(double t, std::span<const double> u, double h,
            std::span<double> inc_high, std::span<double> inc_low) {
    const ButcherTableau& tab = ButcherTableau::cash_karp();
    const auto s_count = static_cast<std::size_t>(tab.stages);
    for (std::size_t s = 0; s < s_count; ++s) {
      for (std::size_t j = 0; j < dim; ++j) {
        double acc = u[j];
        for (std::size_t q = 0; q < s; ++q) {
          acc += h * tab.a[s][q] * k[q][j];
        }
        stage[j] = acc;
      }
      rhs(t + tab.c[s] * h, stage, k[s]);
      for (double v : k[s]) {
        if (!std::isfinite(v)) {
          throw IntegrationError(t, h, "ck45_step: non-finite stage value");
        }
      }
    }
    for (std::size_t j = 0; j < dim; ++j) {
      double hi = 0.0;
      double lo = 0.0;
      for (std::size_t s = 0; s < s_count; ++s) {
        hi += tab.b[s] * k[s][j];
        lo += tab.b_hat[s] * k[s][j];
      }
      inc_high[j] = h * hi;
      inc_low[j] = h * lo;
    }
  }
};

}  // namespace

void ck45_step(const OdeRhs& rhs, double t, std::span<const double> u,
               double h, std::span<double> u_high, std::span<double> u_low,
               std::vector<std::vector<double>>* stages) {
  if (u.empty() || u_high.size() != u.size() || u_low.size() != u.size()) {
    throw std::invalid_argument("ck45_step: dimension mismatch");
  }
  if (!(h > 0.0)) throw std::invalid_argument("ck45_step: h must be > 0");
  Stepper stepper(rhs, u.size());
  stepper.step(t, u, h, u_high, u_low);
  for (std::size_t j = 0; j < u.size(); ++j) {
    u_high[j] += u[j];
    u_low[j] += u[j];
  }
  if (stages != nullptr) *stages = stepper.k;
}

SolverResult integrate_fixed(const OdeRhs& rhs, std::span<const double> u0,
                             double t0, double t_end,
                             std::span<const double> obs_times, double h,
                             int observed_component) {
  if (u0.empty()) throw std::invalid_argument("integrate_fixed: empty state");
  if (!(h > 0.0)) throw std::invalid_argument("integrate_fixed: h must be > 0");
  if (!(t_end >= t0)) {
    throw std::invalid_argument("integrate_fixed: t_end must be >= t0");
  }
  if (observed_component < 0 ||
      static_cast<std::size_t>(observed_component) >= u0.size()) {
    throw std::invalid_argument("integrate_fixed: bad observed component");
  }
  for (std::size_t i = 0; i < obs_times.size(); ++i) {
    if (obs_times[i] < t0 || obs_times[i] > t_end ||
        (i > 0 && obs_times[i] < obs_times[i - 1])) {
      throw std::invalid_argument(
          "integrate_fixed: obs_times must be nondecreasing within [t0, t_end]");
    }
  }

  const std::size_t dim = u0.size();
  SolverResult out;
  out.h = h;
  out.values.reserve(obs_times.size());

  std::vector<double> u(u0.begin(), u0.end());
  std::vector<double> carry(dim, 0.0);  // Neumaier compensation of u
  std::vector<double> inc_high(dim);
  std::vector<double> inc_low(dim);
  std::vector<double> e_hat(dim, 0.0);
  Stepper stepper(rhs, dim);
  const auto obs = static_cast<std::size_t>(observed_component);

  // Time is tracked in double-double form (t + t_low). A plain running sum
  // t += step would leave each observation interval short by its
  // accumulated rounding while the state is recorded as if at the stop;
  // that time defect grows with the step count and shows up as an error
  // floor linear in 1/h, burying the integrator's own convergence.
  double t = t0;
  double t_low = 0.0;
  std::size_t next_obs = 0;
  while (next_obs < obs_times.size() && obs_times[next_obs] <= t) {
    out.values.push_back(u[obs]);
    ++next_obs;
  }
  while (t < t_end) {
    // The next stop is the nearest of obs time and t_end; the step never
    // lengthens past the base h.
    const double stop =
        next_obs < obs_times.size() ? obs_times[next_obs] : t_end;
    const double remaining = (stop - t) - t_low;
    double step = std::min(h, remaining);
    // Absorb slivers so roundoff cannot manufacture an extra tiny step.
    if (remaining - step < 1e-9 * h) step = remaining;
    stepper.step(t, u, step, inc_high, inc_low);
    for (std::size_t j = 0; j < dim; ++j) {
      e_hat[j] += inc_high[j] - inc_low[j];
      // Compensated state accumulation: thousands of small increments on a
      // large state would otherwise leave a roundoff random walk that buries
      // the O(h^5) convergence tail.
      const double y = inc_high[j] + carry[j];
      const double next = u[j] + y;
      carry[j] = std::abs(u[j]) >= std::abs(y) ? (u[j] - next) + y
                                               : (y - next) + u[j];
      u[j] = next;
      if (!std::isfinite(u[j])) {
        throw IntegrationError(t, step,
                               "integrate_fixed: non-finite state value");
      }
    }
    double e_max = 0.0;
    for (double e : e_hat) e_max = std::max(e_max, std::abs(e));
    out.k0_hat = std::max(out.k0_hat, e_max);
    ++out.n_steps;
    if (step == remaining) {
      t = stop;
      t_low = 0.0;
    } else {
      // TwoSum keeps the steps taken summing exactly to the marched time.
      const double s = t + step;
      const double b = s - t;
      t_low += (t - (s - b)) + (step - b);
      t = s;
    }
    while (next_obs < obs_times.size() && obs_times[next_obs] <= t) {
      out.values.push_back(u[obs]);
      ++next_obs;
    }
  }
  return out;
}

SolverResult adaptive_solve(const OdeRhs& rhs, std::span<const double> u0,
                            double t0, double t_end,
                            std::span<const double> obs_times,
                            double tolerance, double h_init, int max_halvings,
                            int observed_component) {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("adaptive_solve: tolerance must be > 0");
  }
  if (!(h_init > 0.0)) {
    throw std::invalid_argument("adaptive_solve: h_init must be > 0");
  }
  if (max_halvings < 0) {
    throw std::invalid_argument("adaptive_solve: max_halvings must be >= 0");
  }
  long long total_steps = 0;
  SolverResult res;
  for (int k = 0;; ++k) {
    const double h = h_init * std::ldexp(1.0, -k);
    bool failed = false;
    try {
      res = integrate_fixed(rhs, u0, t0, t_end, obs_times, h,
                            observed_component);
    } catch (const IntegrationError&) {
      // A finer grid may integrate what this one could not; keep halving.
      failed = true;
      res = SolverResult{};
      res.h = h;
      res.values.assign(obs_times.size(),
                        std::numeric_limits<double>::quiet_NaN());
      res.k0_hat = std::numeric_limits<double>::infinity();
    }
    total_steps += res.n_steps;
    res.n_halvings = k;
    res.n_steps = total_steps;
    if (!failed && res.k0_hat <= tolerance) {
      res.tolerance_met = true;
      return res;
    }
    if (k == max_halvings) break;
  }
  res.tolerance_met = false;
  return res;
}

}  // namespace eabf
