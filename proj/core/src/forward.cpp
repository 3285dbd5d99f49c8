// SPDX-License-Identifier: Apache-2.0
#include "eabf/forward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "eabf/burgers.hpp"
#include "eabf/ode.hpp"

namespace eabf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ForwardResult failed_result(std::size_t n, double discretization) {
  ForwardResult out;
  out.values = Vector::Constant(static_cast<Eigen::Index>(n),
                                std::numeric_limits<double>::quiet_NaN());
  out.k0_hat = kInf;
  out.discretization = discretization;
  out.tolerance_met = false;
  return out;
}

void require_theta(std::span<const double> theta, std::size_t expect,
                   const char* who) {
  if (theta.size() != expect) {
    throw std::invalid_argument(std::string(who) + ": theta must have " +
                                std::to_string(expect) + " components");
  }
}

}  // namespace

LogisticOdeEvaluator::LogisticOdeEvaluator(double x0,
                                           std::vector<double> obs_times,
                                           SolveMode mode,
                                           double discretization,
                                           int max_halvings)
    : x0_(x0),
      obs_times_(std::move(obs_times)),
      mode_(mode),
      h_(discretization),
      max_halvings_(max_halvings) {
  if (!(x0_ > 0.0)) {
    throw std::invalid_argument("LogisticOdeEvaluator: x0 must be > 0");
  }
  if (obs_times_.empty() || !(discretization > 0.0)) {
    throw std::invalid_argument("LogisticOdeEvaluator: bad configuration");
  }
}

ForwardResult LogisticOdeEvaluator::evaluate(std::span<const double> theta,
                                             double tolerance) const {
  require_theta(theta, 2, "LogisticOdeEvaluator");
  const double r = theta[0];
  const double cap = theta[1];
  const OdeRhs rhs = [r, cap](double, std::span<const double> u,
                              std::span<double> dudt) {
    dudt[0] = r * u[0] * (1.0 - u[0] / cap);
  };
  const double u0[1] = {x0_};
  const double t_end = obs_times_.back();

  SolverResult res;
  if (mode_ == SolveMode::adaptive) {
    res = adaptive_solve(rhs, u0, 0.0, t_end, obs_times_, tolerance, h_,
                         max_halvings_);
  } else {
    try {
      res = integrate_fixed(rhs, u0, 0.0, t_end, obs_times_, h_);
      res.tolerance_met = res.k0_hat <= tolerance;
    } catch (const IntegrationError&) {
      return failed_result(obs_times_.size(), h_);
    }
  }
  ForwardResult out;
  out.values = Eigen::Map<const Vector>(
      res.values.data(), static_cast<Eigen::Index>(res.values.size()));
  out.k0_hat = res.k0_hat;
  out.discretization = res.h;
  out.adaptations = res.n_halvings;
  out.tolerance_met = res.tolerance_met;
  return out;
}

LogisticExactEvaluator::LogisticExactEvaluator(double x0,
                                               std::vector<double> obs_times)
    : x0_(x0), obs_times_(std::move(obs_times)) {
  if (!(x0_ > 0.0) || obs_times_.empty()) {
    throw std::invalid_argument("LogisticExactEvaluator: bad configuration");
  }
}

ForwardResult LogisticExactEvaluator::evaluate(std::span<const double> theta,
                                               double) const {
  require_theta(theta, 2, "LogisticExactEvaluator");
  const LogisticParams p{theta[0], theta[1], x0_};
  ForwardResult out;
  out.values = Vector(static_cast<Eigen::Index>(obs_times_.size()));
  for (std::size_t i = 0; i < obs_times_.size(); ++i) {
    out.values[static_cast<Eigen::Index>(i)] =
        logistic_exact(obs_times_[i], p);
  }
  return out;
}

BurgersFvEvaluator::BurgersFvEvaluator(Settings settings,
                                       std::vector<double> obs_times)
    : settings_(settings), obs_times_(std::move(obs_times)) {
  if (obs_times_.empty()) {
    throw std::invalid_argument("BurgersFvEvaluator: no observation times");
  }
  if (!(settings_.viscosity > 0.0) || !(settings_.calibrated_k0 >= 0.0)) {
    throw std::invalid_argument("BurgersFvEvaluator: bad configuration");
  }
}

ForwardResult BurgersFvEvaluator::evaluate(std::span<const double> theta,
                                           double tolerance) const {
  require_theta(theta, 2, "BurgersFvEvaluator");
  const BurgersParams params{settings_.u_left, settings_.u_left - theta[0],
                             theta[1], settings_.viscosity};
  try {
    PdeSolverResult res;
    if (settings_.mode == SolveMode::adaptive) {
      res = adaptive_grid_solve(params, settings_.calibrated_k0, settings_.z1,
                                obs_times_, tolerance, settings_.n_start,
                                settings_.n_max, settings_.cfl);
    } else {
      const Grid1D grid = Grid1D::uniform(settings_.n_fixed);
      res = solve_burgers(params, grid, settings_.z1, obs_times_, nullptr,
                          settings_.cfl);
      res.k0_hat = settings_.calibrated_k0 * grid.dz() * grid.dz();
      res.tolerance_met = res.k0_hat <= tolerance;
    }
    ForwardResult out;
    out.values = Eigen::Map<const Vector>(
        res.u_at_obs.data(), static_cast<Eigen::Index>(res.u_at_obs.size()));
    out.k0_hat = res.k0_hat;
    out.discretization = 4.0 / res.n_used;
    out.adaptations = res.n_doublings;
    out.tolerance_met = res.tolerance_met;
    return out;
  } catch (const std::exception&) {
    // Invalid states for this theta (or a blow-up) reject in the chain.
    return failed_result(obs_times_.size(), 4.0 / settings_.n_fixed);
  }
}

BurgersExactEvaluator::BurgersExactEvaluator(double u_left, double viscosity,
                                             double z1,
                                             std::vector<double> obs_times)
    : u_left_(u_left),
      viscosity_(viscosity),
      z1_(z1),
      obs_times_(std::move(obs_times)) {
  if (!(viscosity_ > 0.0) || obs_times_.empty()) {
    throw std::invalid_argument("BurgersExactEvaluator: bad configuration");
  }
}

ForwardResult BurgersExactEvaluator::evaluate(std::span<const double> theta,
                                              double) const {
  require_theta(theta, 2, "BurgersExactEvaluator");
  const BurgersParams p{u_left_, u_left_ - theta[0], theta[1], viscosity_};
  ForwardResult out;
  out.values = Vector(static_cast<Eigen::Index>(obs_times_.size()));
  for (std::size_t i = 0; i < obs_times_.size(); ++i) {
    out.values[static_cast<Eigen::Index>(i)] =
        burgers_exact(z1_, obs_times_[i], p);
  }
  return out;
}

}  // namespace eabf
