// SPDX-License-Identifier: Apache-2.0
#include "eabf/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eabf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}
}  // namespace

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Polar Box-Muller: draw (v1, v2) uniform on the unit disk, then
  // v * sqrt(-2 log s / s) gives two independent standard normals.
  double v1;
  double v2;
  double s;
  do {
    v1 = 2.0 * uniform() - 1.0;
    v2 = 2.0 * uniform() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v2 * factor;
  has_spare_ = true;
  return v1 * factor;
}

double ComponentTransform::to_unconstrained(double theta) const {
  switch (kind) {
    case Kind::identity:
      return theta;
    case Kind::log:
      if (!(theta > 0.0)) {
        throw std::invalid_argument("ComponentTransform: theta must be > 0");
      }
      return std::log(theta);
    case Kind::logit: {
      if (!(theta > lo) || !(theta < hi)) {
        throw std::invalid_argument(
            "ComponentTransform: theta must lie strictly inside (lo, hi)");
      }
      const double u = (theta - lo) / (hi - lo);
      return std::log(u) - std::log1p(-u);
    }
  }
  throw std::logic_error("ComponentTransform: unknown kind");
}

double ComponentTransform::to_constrained(double x) const {
  switch (kind) {
    case Kind::identity:
      return x;
    case Kind::log:
      return std::exp(x);
    case Kind::logit: {
      const double s =
          x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                   : std::exp(x) / (1.0 + std::exp(x));
      return lo + (hi - lo) * s;
    }
  }
  throw std::logic_error("ComponentTransform: unknown kind");
}

double ComponentTransform::log_jacobian(double x) const {
  switch (kind) {
    case Kind::identity:
      return 0.0;
    case Kind::log:
      return x;
    case Kind::logit:
      // log[(hi-lo) s (1-s)] with s = sigmoid(x), evaluated via softplus.
      return std::log(hi - lo) - softplus(x) - softplus(-x);
  }
  throw std::logic_error("ComponentTransform: unknown kind");
}

ComponentTransform ComponentTransform::for_prior(const PriorComponent& prior) {
  switch (prior.family) {
    case PriorComponent::Family::uniform:
      return ComponentTransform{Kind::logit, prior.a, prior.b};
    case PriorComponent::Family::gamma:
      return ComponentTransform{Kind::log, 0.0, 0.0};
    case PriorComponent::Family::normal:
      return ComponentTransform{Kind::identity, 0.0, 0.0};
  }
  throw std::logic_error("ComponentTransform: unknown prior family");
}

std::vector<ComponentTransform> ComponentTransform::for_prior(
    const PriorSpec& prior) {
  std::vector<ComponentTransform> out;
  out.reserve(prior.components.size());
  for (const auto& c : prior.components) out.push_back(for_prior(c));
  return out;
}

namespace {

// Running mean and variance of the unconstrained chain, one per component.
struct Welford {
  long long n = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit Welford(std::size_t dim) : mean(dim, 0.0), m2(dim, 0.0) {}

  void add(std::span<const double> x) {
    ++n;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double d = x[j] - mean[j];
      mean[j] += d / static_cast<double>(n);
      m2[j] += d * (x[j] - mean[j]);
    }
  }

  double sd(std::size_t j) const {
    return n > 1 ? std::sqrt(m2[j] / static_cast<double>(n - 1)) : 0.0;
  }
};

}  // namespace

Trace run_chain(const LogPostFn& logpost, const SamplerConfig& config) {
  const std::size_t dim = config.initial.size();
  if (dim == 0) throw std::invalid_argument("run_chain: empty initial point");
  if (config.iterations < config.burn_in || config.burn_in < 0) {
    throw std::invalid_argument(
        "run_chain: requires iterations >= burn_in >= 0");
  }
  if (config.initial_scales.size() != dim) {
    throw std::invalid_argument("run_chain: initial_scales size mismatch");
  }
  for (double s : config.initial_scales) {
    if (!(s > 0.0)) {
      throw std::invalid_argument("run_chain: scales must be > 0");
    }
  }
  std::vector<ComponentTransform> transforms = config.transforms;
  if (transforms.empty()) {
    transforms.assign(dim, ComponentTransform{});
  } else if (transforms.size() != dim) {
    throw std::invalid_argument("run_chain: transforms size mismatch");
  }
  if (config.adapt_window < 1) {
    throw std::invalid_argument("run_chain: adapt_window must be >= 1");
  }
  const long long cutoff =
      config.adapt_cutoff < 0 ? config.burn_in : config.adapt_cutoff;

  // Chain state lives in unconstrained coordinates x; the target is
  // evaluated in theta space and corrected by the transform Jacobian.
  std::vector<double> x(dim);
  std::vector<double> theta(config.initial);
  for (std::size_t j = 0; j < dim; ++j) {
    x[j] = transforms[j].to_unconstrained(theta[j]);
  }

  Trace trace;
  trace.dim = dim;

  const auto eval = [&](std::span<const double> th) {
    const LogPostValue v = logpost(th);
    if (v.forward_evaluated) {
      ++trace.solver.n_evaluations;
      trace.solver.n_adaptations += v.adaptations;
      if (!v.tolerance_met) ++trace.solver.n_tolerance_unmet;
    }
    return v;
  };

  LogPostValue cur = eval(theta);
  if (!std::isfinite(cur.value)) {
    throw std::invalid_argument(
        "run_chain: log posterior not finite at the initial point");
  }
  double cur_total = cur.value;
  for (std::size_t j = 0; j < dim; ++j) {
    cur_total += transforms[j].log_jacobian(x[j]);
  }

  RandomStream rng(config.seed);
  std::vector<double> base_scale(config.initial_scales);
  double log_lambda = 0.0;
  Welford spread(dim);
  spread.add(x);

  const long long n_keep = config.iterations - config.burn_in;
  trace.samples.reserve(static_cast<std::size_t>(n_keep) * dim);
  trace.log_posts.reserve(static_cast<std::size_t>(n_keep));
  trace.scales.reserve(static_cast<std::size_t>(config.iterations) * dim);

  std::vector<double> x_prop(dim);
  std::vector<double> theta_prop(dim);
  long long accepted_post = 0;

  const auto t_start = std::chrono::steady_clock::now();
  for (long long it = 0; it < config.iterations; ++it) {
    const double lambda = std::exp(log_lambda);
    for (std::size_t j = 0; j < dim; ++j) {
      trace.scales.push_back(lambda * base_scale[j]);
    }

    // Fixed draw count per iteration keeps streams aligned across runs.
    for (std::size_t j = 0; j < dim; ++j) {
      x_prop[j] = x[j] + lambda * base_scale[j] * rng.normal();
    }
    const double u_accept = rng.uniform();

    double prop_total = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      theta_prop[j] = transforms[j].to_constrained(x_prop[j]);
      prop_total += transforms[j].log_jacobian(x_prop[j]);
    }
    const LogPostValue prop = eval(theta_prop);
    prop_total += prop.value;

    const double log_ratio = prop_total - cur_total;
    const double alpha =
        log_ratio >= 0.0 ? 1.0 : (log_ratio == -kInf ? 0.0 : std::exp(log_ratio));
    if (std::log(u_accept) < log_ratio) {
      x = x_prop;
      theta = theta_prop;
      cur = prop;
      cur_total = prop_total;
      if (it >= config.burn_in) ++accepted_post;
    }

    if (it < cutoff) {
      // Stochastic approximation of the global scale toward the target
      // acceptance rate, with diminishing step; component scales track the
      // chain's running spread once enough mass has accumulated.
      const double gamma =
          std::pow(static_cast<double>(it + 1), -0.6);
      log_lambda += gamma * (alpha - config.target_accept);
      spread.add(x);
      if (spread.n >= 2 * config.adapt_window &&
          (it + 1) % config.adapt_window == 0) {
        for (std::size_t j = 0; j < dim; ++j) {
          const double sd = spread.sd(j);
          if (sd > 1e-12 * std::abs(spread.mean[j]) && sd > 0.0) {
            base_scale[j] = sd;
          }
        }
      }
    }

    if (it >= config.burn_in) {
      trace.samples.insert(trace.samples.end(), theta.begin(), theta.end());
      trace.log_posts.push_back(cur.value);
    }
  }
  const auto t_stop = std::chrono::steady_clock::now();
  trace.wall_seconds =
      std::chrono::duration<double>(t_stop - t_start).count();
  trace.acceptance_rate =
      n_keep > 0 ? static_cast<double>(accepted_post) /
                       static_cast<double>(n_keep)
                 : 0.0;
  return trace;
}

std::vector<double> map_estimate(const Trace& trace) {
  if (trace.size() == 0) {
    throw std::invalid_argument("map_estimate: empty trace");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace.log_posts[i] > trace.log_posts[best]) best = i;
  }
  const auto s = trace.sample(best);
  return std::vector<double>(s.begin(), s.end());
}

double effective_sample_size(const Trace& trace, std::size_t component) {
  const std::size_t n = trace.size();
  if (n < 100) {
    throw std::invalid_argument(
        "effective_sample_size: needs >= 100 samples");
  }
  if (component >= trace.dim) {
    throw std::invalid_argument("effective_sample_size: bad component");
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += trace.component(i, component);
  mean /= static_cast<double>(n);
  const auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      s += (trace.component(i, component) - mean) *
           (trace.component(i + lag, component) - mean);
    }
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 1.0;  // zero-variance trace is degenerate

  // Geyer initial positive sequence: sum paired autocorrelations while the
  // pair sums stay positive.
  double iat = -1.0;
  for (std::size_t t = 0; 2 * t + 1 < n; ++t) {
    const double pair = (autocov(2 * t) + autocov(2 * t + 1)) / c0;
    if (pair <= 0.0) break;
    iat += 2.0 * pair;
  }
  iat = std::max(iat, 1e-12);
  const double ess = static_cast<double>(n) / iat;
  return std::min(ess, static_cast<double>(n));
}

}  // namespace eabf
