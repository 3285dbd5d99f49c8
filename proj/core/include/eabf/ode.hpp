// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eabf {

/// Right-hand side of u' = f(t, u), writing the derivative into dudt.
using OdeRhs =
    std::function<void(double t, std::span<const double> u,
                       std::span<double> dudt)>;

/// A step produced a non-finite stage or state value.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double t, double h, const std::string& what_arg)
      : std::runtime_error(what_arg), t_(t), h_(h) {}
  double t() const { return t_; }
  double h() const { return h_; }

 private:
  double t_;
  double h_;
};

/// Embedded explicit Runge-Kutta tableau: propagated weights b of order p
/// and embedded weights b_hat of order p-1 sharing the stage coefficients.
struct ButcherTableau {
  int stages = 0;
  std::vector<std::vector<double>> a;  ///< strictly lower triangular rows
  std::vector<double> b;
  std::vector<double> b_hat;
  std::vector<double> c;

  /// Throws unless shapes agree, both weight rows sum to 1 (within 1e-14),
  /// and c_i equals the row sum of a_i (within 1e-14).
  void validate() const;

  /// Cash-Karp 4(5) coefficients; the order-5 result is propagated.
  static const ButcherTableau& cash_karp();
};

/// Integration outcome at the requested observation times.
struct SolverResult {
  std::vector<double> values;  ///< observed component at each obs time
  double k0_hat = 0.0;         ///< max_n |e_n|, accumulated error estimate
  double h = 0.0;              ///< base step size of the returned solve
  int n_halvings = 0;          ///< refinements performed (adaptive only)
  bool tolerance_met = true;   ///< k0_hat <= tolerance where one was given
  long long n_steps = 0;       ///< accepted steps, summed over refinements
};

/// One embedded Cash-Karp step from (t, u) with step h: writes the
/// propagated order-5 state into u_high and the embedded order-4 state into
/// u_low; both share the same stage evaluations. When stages is non-null it
/// receives the six stage derivatives K_1..K_6. Throws IntegrationError on a
/// non-finite stage value.
void ck45_step(const OdeRhs& rhs, double t, std::span<const double> u,
               double h, std::span<double> u_high, std::span<double> u_low,
               std::vector<std::vector<double>>* stages = nullptr);

/// Integrates u' = f(t, u) over [t0, t_end] on a uniform grid of base step
/// h, shortening steps locally (never lengthening) to land exactly on every
/// observation time and on t_end. Alongside the propagated solution it
/// accumulates the signed per-step defect tau_n = u_high - u_low into a
/// running global error estimate e_n and reports k0_hat = max_n |e_n| over
/// the whole integration (max norm across components).
///
/// obs_times must be nondecreasing and contained in [t0, t_end]; values[k]
/// holds the observed component at obs_times[k]. Step failures propagate as
/// IntegrationError.
SolverResult integrate_fixed(const OdeRhs& rhs, std::span<const double> u0,
                             double t0, double t_end,
                             std::span<const double> obs_times, double h,
                             int observed_component = 0);

/// Step-halving controller: solves with h = h_init * 2^-k, k = 0, 1, ...,
/// restarting from t0 each time, and returns the first result with
/// k0_hat <= tolerance. Exhausting max_halvings, or a step failure on the
/// last allowed attempt, yields a flagged result (tolerance_met = false,
/// NaN values on failure), never an exception: the chain driving it must
/// not crash.
SolverResult adaptive_solve(const OdeRhs& rhs, std::span<const double> u0,
                            double t0, double t_end,
                            std::span<const double> obs_times,
                            double tolerance, double h_init = 0.1,
                            int max_halvings = 20,
                            int observed_component = 0);

}  // namespace eabf
