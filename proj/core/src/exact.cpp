// SPDX-License-Identifier: Apache-2.0
#include "eabf/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace eabf {

double logistic_exact(double t, const LogisticParams& p) {
  if (!(p.r > 0.0) || !(p.K > 0.0) || !(p.x0 > 0.0)) {
    throw std::invalid_argument("logistic_exact: r, K, x0 must be positive");
  }
  // exp(-r t) <= 1 for t >= 0, so the denominator never overflows there.
  return p.K * p.x0 / (p.x0 + (p.K - p.x0) * std::exp(-p.r * t));
}

double erfc(double x) { return std::erfc(x); }

namespace {

// Asymptotic series erfcx(x) ~ (x sqrt(pi))^-1 sum_k (-1)^k (2k-1)!! / (2x^2)^k,
// truncated where terms fall below 1e-18 relative; valid for x >= 25.
double erfcx_asymptotic(double x) {
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -static_cast<double>(2 * k - 1) * inv2x2;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum / (x * std::sqrt(M_PI));
}

}  // namespace

double erfcx(double x) {
  if (x < 0.0) {
    // erfcx(x) = 2 exp(x^2) - erfcx(-x); the first term dominates, so the
    // subtraction loses no precision. Overflows to inf only when the true
    // value itself exceeds the double range (x < -26.6).
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x <= 25.0) return std::exp(x * x) * std::erfc(x);
  return erfcx_asymptotic(x);
}

double log_erfc(double x) {
  // std::erfc stays in the normal double range up to x = 25; beyond that
  // switch to the scaled form, where log(erfc) = log(erfcx) - x^2.
  if (x <= 25.0) return std::log(std::erfc(x));
  return std::log(erfcx_asymptotic(x)) - x * x;
}

double burgers_exact(double z, double t, const BurgersParams& p) {
  if (!(p.u_left > p.u_right)) {
    throw std::invalid_argument("burgers_exact: requires u_left > u_right");
  }
  if (!(p.viscosity > 0.0)) {
    throw std::invalid_argument("burgers_exact: viscosity must be positive");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("burgers_exact: t must be nonnegative");
  }
  if (t == 0.0) {
    if (z < p.z0) return p.u_left;
    if (z > p.z0) return p.u_right;
    return 0.5 * (p.u_left + p.u_right);
  }
  const double du = p.u_left - p.u_right;
  const double c = 0.5 * (p.u_left + p.u_right);
  const double zz = z - p.z0;
  const double s = std::sqrt(4.0 * p.viscosity * t);
  const double a = (zz - p.u_right * t) / s;
  const double b = (zz - p.u_left * t) / s;
  // Cole-Hopf: u = u_right + du * w with w = I_L / (I_L + I_R) and
  // log(I_R / I_L) = g below; evaluating g in log space keeps the two
  // half-line heat integrals finite arbitrarily far from the shock.
  const double g =
      du / (2.0 * p.viscosity) * (zz - c * t) + log_erfc(-a) - log_erfc(b);
  const double w = g >= 0.0 ? std::exp(-g) / (1.0 + std::exp(-g))
                            : 1.0 / (1.0 + std::exp(g));
  return p.u_right + du * w;
}

}  // namespace eabf
