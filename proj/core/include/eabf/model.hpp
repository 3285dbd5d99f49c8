// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace eabf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Observation locations x_1..x_n, each a point in R^m (time, or space-time).
class Locations {
 public:
  Locations() = default;  ///< empty; validate() rejects datasets built on it
  /// Points on the time axis (m = 1).
  static Locations at_times(std::vector<double> times);
  /// A fixed spatial point observed at several times (m = 2, coords (z, t)).
  static Locations at_point_times(double z, std::vector<double> times);
  explicit Locations(std::vector<std::vector<double>> points);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.empty() ? 0 : points_[0].size(); }
  const std::vector<double>& point(std::size_t i) const { return points_[i]; }
  /// Euclidean distance between locations i and j.
  double distance(std::size_t i, std::size_t j) const;

 private:
  std::vector<std::vector<double>> points_;
};

/// Observed data y_i at the corresponding locations.
struct Dataset {
  Vector y;
  Locations locations;

  /// Throws unless y is finite and matches the location count (n >= 1).
  void validate() const;
};

/// Stationary correlation family for the error precision structure.
enum class CorrelationKind {
  exponential,          ///< rho(d) = exp(-d / length_scale)
  squared_exponential,  ///< rho(d) = exp(-(d / length_scale)^2)
};

/// Specification of the n x n precision-related matrix A in the likelihood:
/// the error covariance is sigma^2 A^-1 with [A^-1]_ij = rho(d(x_i, x_j)).
struct PrecisionSpec {
  enum class Kind { identity, isotropic };
  Kind kind = Kind::identity;
  CorrelationKind rho = CorrelationKind::exponential;
  double length_scale = 1.0;
};

/// A = inverse of the correlation matrix, b_i = sqrt([A^-1]_ii).
struct PrecisionMatrices {
  Matrix a;
  Vector b;
};

/// Builds A and b from the correlation specification. The correlation matrix
/// must be symmetric positive definite; otherwise throws invalid_argument.
PrecisionMatrices build_precision(const PrecisionSpec& spec,
                                  const Locations& locations);

/// As build_precision but with a caller-supplied correlation matrix; used to
/// exercise non-trivial structures directly.
PrecisionMatrices build_precision_from_correlation(const Matrix& correlation);

/// Noise standard deviation model: either a fixed sigma or a prior density
/// g(sigma) on (0, inf) used for the harmonic-mean summary sigma_star.
class NoiseModel {
 public:
  enum class Kind { fixed, gamma, normal, uniform };

  static NoiseModel fixed(double sigma);
  /// Gamma(shape, rate) prior on sigma.
  static NoiseModel gamma_prior(double shape, double rate);
  /// Normal(mean, sd) prior, truncated to sigma > 0 when evaluated.
  static NoiseModel normal_prior(double mean, double sd);
  static NoiseModel uniform_prior(double lo, double hi);

  Kind kind() const { return kind_; }
  bool is_fixed() const { return kind_ == Kind::fixed; }
  /// Fixed value; throws unless is_fixed().
  double sigma() const;
  /// Prior density g(s); zero outside the support.
  double density(double s) const;
  double param_a() const { return a_; }
  double param_b() const { return b_; }

 private:
  NoiseModel(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_;
  double b_;
};

/// One independent prior component for a model parameter.
struct PriorComponent {
  enum class Family { uniform, gamma, normal };
  Family family = Family::uniform;
  double a = 0.0;  ///< uniform: lo, gamma: shape, normal: mean
  double b = 1.0;  ///< uniform: hi, gamma: rate,  normal: sd

  bool in_support(double x) const;
  /// Log density; -inf outside the support.
  double log_density(double x) const;
  /// Support bounds (-inf / +inf where unbounded).
  double lower() const;
  double upper() const;

  static PriorComponent uniform(double lo, double hi);
  static PriorComponent gamma(double shape, double rate);
  static PriorComponent normal(double mean, double sd);
};

/// Independent product prior over the parameter vector theta.
struct PriorSpec {
  std::vector<PriorComponent> components;

  std::size_t dim() const { return components.size(); }
  bool in_support(std::span<const double> theta) const;
  double log_density(std::span<const double> theta) const;
};

/// Gaussian log likelihood with correlated errors:
/// -(n/2) log(2 pi sigma^2) + (1/2) log|A| - (y-f)' A (y-f) / (2 sigma^2).
/// A must be symmetric positive definite; throws otherwise.
double log_likelihood(const Vector& y, const Vector& f, double sigma,
                      const Matrix& a);

/// Outcome of a forward-map evaluation at the observation locations.
struct ForwardResult {
  Vector values;                 ///< model output at each location
  double k0_hat = 0.0;           ///< estimated sup-norm numerical error
  double discretization = 0.0;   ///< step size or cell width actually used
  int adaptations = 0;           ///< refinement steps taken for this call
  bool tolerance_met = true;     ///< k0_hat <= requested tolerance
};

/// Numerical forward map theta -> model outputs at the observation
/// locations, solved to a requested uniform error tolerance.
class ForwardEvaluator {
 public:
  virtual ~ForwardEvaluator() = default;
  /// Number of observations produced per evaluation.
  virtual std::size_t size() const = 0;
  virtual ForwardResult evaluate(std::span<const double> theta,
                                 double tolerance) const = 0;
};

/// Posterior evaluation record: log density plus the forward solve behind it.
struct LogPosteriorEval {
  double value = 0.0;
  ForwardResult forward;
  bool forward_evaluated = false;  ///< false when the prior already rejected
};

/// Bayesian inverse problem: dataset, precision structure, fixed-sigma noise
/// model, independent prior, and a numerical forward map. Caches the
/// Cholesky factor of A so repeated likelihood evaluations cost one
/// triangular product.
class PosteriorProblem {
 public:
  PosteriorProblem(Dataset data, PrecisionSpec precision, NoiseModel noise,
                   PriorSpec prior,
                   std::shared_ptr<const ForwardEvaluator> forward);

  /// Log posterior density at theta with the forward map solved to the
  /// given tolerance. Out-of-support theta yields value = -inf without
  /// invoking the forward map.
  LogPosteriorEval log_posterior(std::span<const double> theta,
                                 double tolerance) const;

  /// Log likelihood of precomputed forward outputs via the cached factor.
  double log_likelihood_at(const Vector& f) const;

  std::size_t n() const { return static_cast<std::size_t>(data_.y.size()); }
  double sigma() const { return noise_.sigma(); }
  const Dataset& data() const { return data_; }
  const PrecisionMatrices& precision() const { return precision_matrices_; }
  const PriorSpec& prior() const { return prior_; }
  const NoiseModel& noise() const { return noise_; }
  const ForwardEvaluator& forward() const { return *forward_; }

 private:
  Dataset data_;
  NoiseModel noise_;
  PriorSpec prior_;
  std::shared_ptr<const ForwardEvaluator> forward_;
  PrecisionMatrices precision_matrices_;
  Eigen::LLT<Matrix> chol_a_;
  double log_det_a_;
};

}  // namespace eabf
