// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace eabf {

/// Logistic growth model dX/dt = r X (1 - X/K), X(0) = x0.
struct LogisticParams {
  double r;   ///< intrinsic growth rate, r > 0
  double K;   ///< carrying capacity, K > 0
  double x0;  ///< initial population, x0 > 0
};

/// Closed-form logistic solution K x0 / (x0 + (K - x0) exp(-r t)).
/// Evaluated in a form that cannot overflow for large r t.
double logistic_exact(double t, const LogisticParams& p);

/// Complementary error function.
/// Absolute error <= 1e-13 on [-6, 6], relative error <= 1e-10 on (6, 26].
double erfc(double x);

/// Scaled complement exp(x^2) erfc(x); finite for all x <= 26 and
/// usable far beyond where erfc itself underflows.
double erfcx(double x);

/// log(erfc(x)); avoids underflow of erfc for large positive x.
double log_erfc(double x);

/// Riemann initial data for the viscous Burgers equation
/// u_t + u u_z = viscosity * u_zz on z in [0, 4]:
/// u(z, 0) = u_left for z < z0, u_right for z > z0, with u_left > u_right
/// so the profile is a viscous shock travelling right at (u_left + u_right)/2.
struct BurgersParams {
  double u_left = 2.0;
  double u_right = 1.0;
  double z0 = 1.0;          ///< initial jump location
  double viscosity = 0.05;  ///< diffusion coefficient, > 0
};

/// Cole-Hopf closed form of the viscous shock profile. The two-term
/// similarity solution is evaluated through log_erfc so it stays finite
/// for t -> 0+ and far from the shock. At t = 0 returns the step data
/// (midpoint value at z = z0 exactly).
double burgers_exact(double z, double t, const BurgersParams& p);

}  // namespace eabf
