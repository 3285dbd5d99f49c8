// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "eabf/exact.hpp"
#include "eabf/model.hpp"

namespace eabf {

/// How a numerical forward map meets the requested tolerance.
enum class SolveMode {
  fixed,     ///< one fixed discretization; tolerance only checked
  adaptive,  ///< refine until the error estimate meets the tolerance
};

/// Logistic growth forward map theta = (r, K) -> X(t_j), solved by the
/// embedded Runge-Kutta integrator. In fixed mode the step is
/// discretization; in adaptive mode it is the initial step of the halving
/// controller. Integration failures surface as NaN outputs with an
/// infinite error estimate, never exceptions, so a chain can reject and
/// move on.
class LogisticOdeEvaluator : public ForwardEvaluator {
 public:
  LogisticOdeEvaluator(double x0, std::vector<double> obs_times,
                       SolveMode mode, double discretization,
                       int max_halvings = 20);

  std::size_t size() const override { return obs_times_.size(); }
  ForwardResult evaluate(std::span<const double> theta,
                         double tolerance) const override;

 private:
  double x0_;
  std::vector<double> obs_times_;
  SolveMode mode_;
  double h_;
  int max_halvings_;
};

/// Analytic logistic forward map; reserved for data generation and oracle
/// comparisons, never for the sampled posterior.
class LogisticExactEvaluator : public ForwardEvaluator {
 public:
  LogisticExactEvaluator(double x0, std::vector<double> obs_times);

  std::size_t size() const override { return obs_times_.size(); }
  ForwardResult evaluate(std::span<const double> theta,
                         double tolerance) const override;

 private:
  double x0_;
  std::vector<double> obs_times_;
};

/// Viscous Burgers forward map theta = (u_left - u_right, z0) -> u(z1, t_j)
/// with the left state pinned at u_left. Fixed mode solves on n_fixed
/// cells; adaptive mode runs the grid-doubling controller between n_start
/// and n_max using the calibrated error constant (predicted observation
/// error = calibrated_k0 * dz^2).
class BurgersFvEvaluator : public ForwardEvaluator {
 public:
  struct Settings {
    double u_left = 2.0;
    double viscosity = 0.05;
    double z1 = 2.0;
    double cfl = 0.1;
    SolveMode mode = SolveMode::fixed;
    int n_fixed = 512;
    int n_start = 128;
    int n_max = 512;
    double calibrated_k0 = 0.0;  ///< 0 disables the error prediction
  };

  BurgersFvEvaluator(Settings settings, std::vector<double> obs_times);

  std::size_t size() const override { return obs_times_.size(); }
  ForwardResult evaluate(std::span<const double> theta,
                         double tolerance) const override;

 private:
  Settings settings_;
  std::vector<double> obs_times_;
};

/// Analytic Cole-Hopf forward map with the same parameterization as
/// BurgersFvEvaluator; reserved for data generation and oracles.
class BurgersExactEvaluator : public ForwardEvaluator {
 public:
  BurgersExactEvaluator(double u_left, double viscosity, double z1,
                        std::vector<double> obs_times);

  std::size_t size() const override { return obs_times_.size(); }
  ForwardResult evaluate(std::span<const double> theta,
                         double tolerance) const override;

 private:
  double u_left_;
  double viscosity_;
  double z1_;
  std::vector<double> obs_times_;
};

}  // namespace eabf
