// SPDX-License-Identifier: Apache-2.0
#include "eabf/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "eabf/exact.hpp"

namespace eabf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
}  // namespace

Locations Locations::at_times(std::vector<double> times) {
  std::vector<std::vector<double>> pts;
  pts.reserve(times.size());
  for (double t : times) pts.push_back({t});
  return Locations(std::move(pts));
}

Locations Locations::at_point_times(double z, std::vector<double> times) {
  std::vector<std::vector<double>> pts;
  pts.reserve(times.size());
  for (double t : times) pts.push_back({z, t});
  return Locations(std::move(pts));
}

Locations::Locations(std::vector<std::vector<double>> points)
    : points_(std::move(points)) {
  const std::size_t m = points_.empty() ? 0 : points_[0].size();
  for (const auto& p : points_) {
    if (p.size() != m || m == 0) {
      throw std::invalid_argument("Locations: points must share one dimension");
    }
    for (double c : p) {
      if (!std::isfinite(c)) {
        throw std::invalid_argument("Locations: coordinates must be finite");
      }
    }
  }
}

double Locations::distance(std::size_t i, std::size_t j) const {
  const auto& p = points_.at(i);
  const auto& q = points_.at(j);
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p[k] - q[k];
    s += d * d;
  }
  return std::sqrt(s);
}

void Dataset::validate() const {
  if (y.size() < 1) throw std::invalid_argument("Dataset: needs n >= 1");
  if (static_cast<std::size_t>(y.size()) != locations.size()) {
    throw std::invalid_argument("Dataset: y and locations sizes differ");
  }
  if (!y.allFinite()) throw std::invalid_argument("Dataset: y must be finite");
}

namespace {

double correlation_value(const PrecisionSpec& spec, double d) {
  const double u = d / spec.length_scale;
  switch (spec.rho) {
    case CorrelationKind::exponential: return std::exp(-u);
    case CorrelationKind::squared_exponential: return std::exp(-u * u);
  }
  throw std::logic_error("correlation_value: unknown kind");
}

}  // namespace

PrecisionMatrices build_precision_from_correlation(const Matrix& correlation) {
  const Eigen::Index n = correlation.rows();
  if (n < 1 || correlation.cols() != n) {
    throw std::invalid_argument("build_precision: matrix must be square");
  }
  const double scale = correlation.cwiseAbs().maxCoeff();
  if (!correlation.allFinite() ||
      (correlation - correlation.transpose()).cwiseAbs().maxCoeff() >
          1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument("build_precision: matrix must be symmetric");
  }
  Eigen::LLT<Matrix> llt(correlation);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "build_precision: correlation matrix is not positive definite");
  }
  PrecisionMatrices out;
  out.a = llt.solve(Matrix::Identity(n, n));
  // Eliminate the asymmetry the solve leaves at roundoff level.
  out.a = ((out.a + out.a.transpose()) / 2.0).eval();
  out.b = correlation.diagonal().cwiseSqrt();
  return out;
}

PrecisionMatrices build_precision(const PrecisionSpec& spec,
                                  const Locations& locations) {
  const Eigen::Index n = static_cast<Eigen::Index>(locations.size());
  if (n < 1) throw std::invalid_argument("build_precision: needs n >= 1");
  if (spec.kind == PrecisionSpec::Kind::identity) {
    PrecisionMatrices out;
    out.a = Matrix::Identity(n, n);
    out.b = Vector::Ones(n);
    return out;
  }
  if (!(spec.length_scale > 0.0)) {
    throw std::invalid_argument("build_precision: length_scale must be > 0");
  }
  Matrix corr(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    corr(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = correlation_value(
          spec, locations.distance(static_cast<std::size_t>(i),
                                   static_cast<std::size_t>(j)));
      corr(i, j) = v;
      corr(j, i) = v;
    }
  }
  return build_precision_from_correlation(corr);
}

NoiseModel NoiseModel::fixed(double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("NoiseModel: sigma must be > 0");
  }
  return NoiseModel(Kind::fixed, sigma, 0.0);
}

NoiseModel NoiseModel::gamma_prior(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("NoiseModel: gamma needs shape, rate > 0");
  }
  return NoiseModel(Kind::gamma, shape, rate);
}

NoiseModel NoiseModel::normal_prior(double mean, double sd) {
  if (!(sd > 0.0)) {
    throw std::invalid_argument("NoiseModel: normal needs sd > 0");
  }
  return NoiseModel(Kind::normal, mean, sd);
}

NoiseModel NoiseModel::uniform_prior(double lo, double hi) {
  // lo = 0 makes E[1/sigma] diverge, which degenerates the noise summary.
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("NoiseModel: uniform needs 0 < lo < hi");
  }
  return NoiseModel(Kind::uniform, lo, hi);
}

double NoiseModel::sigma() const {
  if (kind_ != Kind::fixed) {
    throw std::logic_error("NoiseModel: sigma() requires a fixed noise level");
  }
  return a_;
}

double NoiseModel::density(double s) const {
  if (kind_ == Kind::fixed) {
    throw std::logic_error("NoiseModel: fixed noise has no density");
  }
  if (!(s > 0.0)) return 0.0;
  switch (kind_) {
    case Kind::gamma:
      return std::exp(a_ * std::log(b_) - std::lgamma(a_) +
                      (a_ - 1.0) * std::log(s) - b_ * s);
    case Kind::normal: {
      // Truncated to s > 0 and renormalized.
      const double zn = 0.5 * eabf::erfc(-a_ / (b_ * std::sqrt(2.0)));
      const double u = (s - a_) / b_;
      return std::exp(-0.5 * u * u) / (b_ * std::sqrt(2.0 * M_PI)) / zn;
    }
    case Kind::uniform:
      return (s >= a_ && s <= b_) ? 1.0 / (b_ - a_) : 0.0;
    case Kind::fixed: break;
  }
  throw std::logic_error("NoiseModel: unknown kind");
}

PriorComponent PriorComponent::uniform(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("PriorComponent: needs hi > lo");
  return PriorComponent{Family::uniform, lo, hi};
}

PriorComponent PriorComponent::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("PriorComponent: gamma needs shape, rate > 0");
  }
  return PriorComponent{Family::gamma, shape, rate};
}

PriorComponent PriorComponent::normal(double mean, double sd) {
  if (!(sd > 0.0)) {
    throw std::invalid_argument("PriorComponent: normal needs sd > 0");
  }
  return PriorComponent{Family::normal, mean, sd};
}

bool PriorComponent::in_support(double x) const {
  switch (family) {
    case Family::uniform: return x >= a && x <= b;
    case Family::gamma: return x > 0.0;
    case Family::normal: return std::isfinite(x);
  }
  throw std::logic_error("PriorComponent: unknown family");
}

double PriorComponent::log_density(double x) const {
  if (!in_support(x)) return -kInf;
  switch (family) {
    case Family::uniform:
      return -std::log(b - a);
    case Family::gamma:
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) -
             b * x;
    case Family::normal: {
      const double u = (x - a) / b;
      return -0.5 * kLog2Pi - std::log(b) - 0.5 * u * u;
    }
  }
  throw std::logic_error("PriorComponent: unknown family");
}

double PriorComponent::lower() const {
  switch (family) {
    case Family::uniform: return a;
    case Family::gamma: return 0.0;
    case Family::normal: return -kInf;
  }
  throw std::logic_error("PriorComponent: unknown family");
}

double PriorComponent::upper() const {
  switch (family) {
    case Family::uniform: return b;
    case Family::gamma: return kInf;
    case Family::normal: return kInf;
  }
  throw std::logic_error("PriorComponent: unknown family");
}

bool PriorSpec::in_support(std::span<const double> theta) const {
  if (theta.size() != components.size()) {
    throw std::invalid_argument("PriorSpec: dimension mismatch");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!components[i].in_support(theta[i])) return false;
  }
  return true;
}

double PriorSpec::log_density(std::span<const double> theta) const {
  if (theta.size() != components.size()) {
    throw std::invalid_argument("PriorSpec: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    s += components[i].log_density(theta[i]);
  }
  return s;
}

double log_likelihood(const Vector& y, const Vector& f, double sigma,
                      const Matrix& a) {
  const Eigen::Index n = y.size();
  if (n < 1 || f.size() != n || a.rows() != n || a.cols() != n) {
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("log_likelihood: sigma must be > 0");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  if (!a.allFinite() || (a - a.transpose()).cwiseAbs().maxCoeff() >
                            1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument("log_likelihood: A must be symmetric");
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("log_likelihood: A not positive definite");
  }
  const double log_det =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Vector r = y - f;
  const double quad = (llt.matrixL().transpose() * r).squaredNorm();
  return -0.5 * static_cast<double>(n) * (kLog2Pi + 2.0 * std::log(sigma)) +
         0.5 * log_det - quad / (2.0 * sigma * sigma);
}

PosteriorProblem::PosteriorProblem(
    Dataset data, PrecisionSpec precision, NoiseModel noise, PriorSpec prior,
    std::shared_ptr<const ForwardEvaluator> forward)
    : data_(std::move(data)),
      noise_(noise),
      prior_(std::move(prior)),
      forward_(std::move(forward)) {
  data_.validate();
  if (!noise_.is_fixed()) {
    throw std::invalid_argument(
        "PosteriorProblem: requires a fixed noise level");
  }
  if (!forward_) {
    throw std::invalid_argument("PosteriorProblem: forward map is null");
  }
  if (forward_->size() != n()) {
    throw std::invalid_argument(
        "PosteriorProblem: forward map size differs from data size");
  }
  if (prior_.dim() == 0) {
    throw std::invalid_argument("PosteriorProblem: prior has dimension 0");
  }
  precision_matrices_ = build_precision(precision, data_.locations);
  chol_a_.compute(precision_matrices_.a);
  if (chol_a_.info() != Eigen::Success) {
    throw std::invalid_argument("PosteriorProblem: A not positive definite");
  }
  log_det_a_ =
      2.0 * chol_a_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double PosteriorProblem::log_likelihood_at(const Vector& f) const {
  if (f.size() != data_.y.size()) {
    throw std::invalid_argument("log_likelihood_at: size mismatch");
  }
  const double sg = noise_.sigma();
  const Vector r = data_.y - f;
  const double quad = (chol_a_.matrixL().transpose() * r).squaredNorm();
  return -0.5 * static_cast<double>(n()) * (kLog2Pi + 2.0 * std::log(sg)) +
         0.5 * log_det_a_ - quad / (2.0 * sg * sg);
}

LogPosteriorEval PosteriorProblem::log_posterior(std::span<const double> theta,
                                                 double tolerance) const {
  LogPosteriorEval out;
  if (!prior_.in_support(theta)) {
    out.value = -kInf;
    return out;
  }
  out.forward = forward_->evaluate(theta, tolerance);
  out.forward_evaluated = true;
  if (!out.forward.values.allFinite()) {
    out.value = -kInf;
    return out;
  }
  out.value =
      prior_.log_density(theta) + log_likelihood_at(out.forward.values);
  return out;
}

}  // namespace eabf
