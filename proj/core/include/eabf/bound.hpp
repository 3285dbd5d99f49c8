// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "eabf/model.hpp"

namespace eabf {

/// Admissible forward-map tolerance derived from the expected absolute
/// Bayes factor bound
///   E|B - 1| <= sqrt(1 / (2 pi)) * (n / sigma_star) * K0 * factor,
/// solved for the largest K0 keeping the right side at target.
struct ToleranceReport {
  std::size_t n = 0;
  double sigma_star = 0.0;         ///< harmonic-mean noise level
  double correlation_factor = 0.0; ///< max_i b_i * mean_i sum_j |a_ij|
  double target_eabf = 0.0;        ///< bound on E|B - 1|, in (0, 1]
  double k0_admissible = 0.0;      ///< admissible uniform forward error
  double k_constant = 0.0;         ///< target_eabf * sqrt(2 pi)
};

/// Harmonic-mean noise summary sigma_star = (E[1/sigma])^-1 under the noise
/// prior; equals sigma itself for a fixed noise level. The expectation is
/// integrated numerically to a relative tolerance of 1e-8. Priors with a
/// divergent E[1/sigma] (gamma shape <= 1) are rejected.
double sigma_star(const NoiseModel& noise);

/// Correlation contribution (max_i b_i) * (1/n) sum_i sum_j |a_ij|.
/// Equals 1 when A is the identity.
double correlation_factor(const Matrix& a, const Vector& b);
double correlation_factor(const PrecisionMatrices& precision);

/// Upper bound on E|B - 1| for a given uniform forward error k0.
double eabf_upper_bound(std::size_t n, double sigma_star, double k0,
                        double correlation_factor);

/// Largest K0 with eabf_upper_bound(n, sigma_star, K0, factor) <= target:
/// K0 = target * sqrt(2 pi) * sigma_star / (n * factor).
ToleranceReport admissible_k0(std::size_t n, double sigma_star,
                              double correlation_factor,
                              double target_eabf = 0.05);

}  // namespace eabf
