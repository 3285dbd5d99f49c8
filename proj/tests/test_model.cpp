// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "eabf/bound.hpp"
#include "eabf/forward.hpp"
#include "eabf/model.hpp"

using namespace eabf;

namespace {

double normal_logpdf(double y, double mean, double sigma) {
  const double r = (y - mean) / sigma;
  return -0.5 * std::log(2.0 * M_PI * sigma * sigma) - 0.5 * r * r;
}

}  // namespace

TEST_CASE("likelihood factorizes over independent observations") {
  // with A = I the joint Gaussian is the product of the marginals
  std::mt19937_64 gen(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 8);
    Vector y(n);
    Vector f(n);
    for (int i = 0; i < n; ++i) {
      y[i] = 3.0 * noise(gen);
      f[i] = 3.0 * noise(gen);
    }
    const double sigma = 0.1 + std::abs(noise(gen));
    const Matrix a = Matrix::Identity(n, n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += normal_logpdf(y[i], f[i], sigma);
    CHECK(std::abs(log_likelihood(y, f, sigma, a) - sum) <= 1e-12);
  }
}

TEST_CASE("likelihood shift and scale relations") {
  Vector y(3);
  y << 1.0, -0.5, 2.25;
  Vector f(3);
  f << 0.75, 0.0, 2.0;
  const Matrix a = Matrix::Identity(3, 3);
  const double base = log_likelihood(y, f, 1.3, a);

  // common shift leaves the residuals alone
  const Vector shift = Vector::Constant(3, 17.0);
  CHECK(log_likelihood(y + shift, f + shift, 1.3, a) ==
        doctest::Approx(base).epsilon(1e-14));

  // scaling residuals and sigma by c costs n log c
  for (double c : {0.5, 2.0}) {
    const double scaled = log_likelihood((c * (y - f)).eval(),
                                         Vector::Zero(3).eval(), c * 1.3, a);
    const double centered =
        log_likelihood((y - f).eval(), Vector::Zero(3).eval(), 1.3, a);
    CHECK(scaled == doctest::Approx(centered - 3.0 * std::log(c))
                        .epsilon(1e-13));
  }
}

TEST_CASE("likelihood reference values") {
  // single zero residual at sigma = 1: -log(sqrt(2 pi))
  Vector y1(1);
  y1 << 4.0;
  CHECK(log_likelihood(y1, y1, 1.0, Matrix::Identity(1, 1)) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));

  // dense 2x2 precision against a by-hand evaluation
  Matrix a(2, 2);
  a << 2.0, 0.3, 0.3, 1.0;
  Vector y(2);
  y << 0.5, -1.2;
  const Vector f = Vector::Zero(2);
  CHECK(log_likelihood(y, f, 0.7, a) ==
        doctest::Approx(-2.4132204554617953).epsilon(1e-13));
}

TEST_CASE("likelihood rejects invalid precision") {
  Vector y(2);
  y << 1.0, 2.0;
  Matrix indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  CHECK_THROWS_AS(log_likelihood(y, y, 1.0, indef), std::invalid_argument);
  CHECK_THROWS_AS(log_likelihood(y, y, 0.0, Matrix::Identity(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("locations and distances") {
  const Locations times = Locations::at_times({0.0, 0.4, 1.0});
  CHECK(times.size() == 3);
  CHECK(times.dim() == 1);
  CHECK(times.distance(0, 2) == doctest::Approx(1.0));

  const Locations pt = Locations::at_point_times(2.0, {0.0, 0.5});
  CHECK(pt.size() == 2);
  CHECK(pt.dim() == 2);
  CHECK(pt.point(1)[0] == 2.0);
  CHECK(pt.point(1)[1] == 0.5);
  CHECK(pt.distance(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.y = Vector::Ones(3);
  d.locations = Locations::at_times({0.0, 1.0, 2.0});
  CHECK_NOTHROW(d.validate());
  d.y[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d.y = Vector::Ones(2);  // count mismatch
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("prior component densities") {
  const PriorComponent u = PriorComponent::uniform(0.01, 4.0);
  CHECK(u.log_density(1.0) == doctest::Approx(-1.3837912309017721)
                                  .epsilon(1e-14));  // log 1/3.99
  CHECK(u.log_density(5.0) == -std::numeric_limits<double>::infinity());
  CHECK(u.in_support(0.011));
  CHECK_FALSE(u.in_support(0.0));

  const PriorComponent g = PriorComponent::gamma(2.0, 3.0);
  CHECK(g.log_density(0.8) ==
        doctest::Approx(-0.4259189739779905).epsilon(1e-13));
  CHECK(g.log_density(-0.1) == -std::numeric_limits<double>::infinity());
  CHECK(g.lower() == 0.0);

  const PriorComponent n = PriorComponent::normal(1.5, 0.4);
  CHECK(n.log_density(2.1) ==
        doctest::Approx(-1.1276478013305178).epsilon(1e-13));
  CHECK(n.in_support(-100.0));
}

TEST_CASE("product prior sums component densities") {
  PriorSpec prior;
  prior.components = {PriorComponent::uniform(0.0, 2.0),
                      PriorComponent::normal(0.0, 1.0)};
  const double theta[] = {1.0, 0.5};
  CHECK(prior.log_density(theta) ==
        doctest::Approx(std::log(0.5) + normal_logpdf(0.5, 0.0, 1.0))
            .epsilon(1e-13));
  const double outside[] = {3.0, 0.5};
  CHECK_FALSE(prior.in_support(outside));
  CHECK(prior.log_density(outside) ==
        -std::numeric_limits<double>::infinity());
}

namespace {

PosteriorProblem logistic_problem(std::shared_ptr<const ForwardEvaluator> fwd,
                                  const std::vector<double>& times) {
  Dataset data;
  data.locations = Locations::at_times(times);
  data.y = Vector(static_cast<Eigen::Index>(times.size()));
  const LogisticParams truth{1.0, 1000.0, 100.0};
  for (std::size_t i = 0; i < times.size(); ++i) {
    data.y[static_cast<Eigen::Index>(i)] =
        logistic_exact(times[i], truth) + 5.0;  // fixed offset, no RNG
  }
  PriorSpec prior;
  prior.components = {PriorComponent::uniform(0.01, 4.0),
                      PriorComponent::uniform(100.0, 5000.0)};
  return PosteriorProblem(data, PrecisionSpec{}, NoiseModel::fixed(30.0),
                          prior, std::move(fwd));
}

}  // namespace

TEST_CASE("posterior short-circuits outside the prior support") {
  std::vector<double> times;
  for (int i = 0; i < 26; ++i) times.push_back(10.0 * i / 25.0);
  auto fwd = std::make_shared<LogisticExactEvaluator>(100.0, times);
  const PosteriorProblem post = logistic_problem(fwd, times);
  const double theta[] = {5.0, 1000.0};  // growth rate outside its prior
  const LogPosteriorEval e = post.log_posterior(theta, 0.13);
  CHECK(e.value == -std::numeric_limits<double>::infinity());
  CHECK_FALSE(e.forward_evaluated);
}

TEST_CASE("numerical and exact forward maps agree in the posterior") {
  // the integrator at its admissible tolerance moves the log posterior by
  // far less than the bound's target deviation
  std::vector<double> times;
  for (int i = 0; i < 26; ++i) times.push_back(10.0 * i / 25.0);
  auto exact = std::make_shared<LogisticExactEvaluator>(100.0, times);
  auto ode = std::make_shared<LogisticOdeEvaluator>(
      100.0, times, SolveMode::adaptive, 0.1);
  const PosteriorProblem post_exact = logistic_problem(exact, times);
  const PosteriorProblem post_ode = logistic_problem(ode, times);
  const double theta[] = {1.05, 980.0};
  const LogPosteriorEval a = post_exact.log_posterior(theta, 0.13);
  const LogPosteriorEval b = post_ode.log_posterior(theta, 0.13);
  CHECK(b.forward.k0_hat <= 0.13);
  CHECK(b.forward.tolerance_met);
  CHECK(std::abs(a.value - b.value) <= 0.05);
}

TEST_CASE("posterior evaluation is deterministic") {
  std::vector<double> times;
  for (int i = 0; i < 26; ++i) times.push_back(10.0 * i / 25.0);
  auto ode = std::make_shared<LogisticOdeEvaluator>(
      100.0, times, SolveMode::adaptive, 0.1);
  const PosteriorProblem post = logistic_problem(ode, times);
  const double theta[] = {0.97, 1040.0};
  const LogPosteriorEval a = post.log_posterior(theta, 0.13);
  const LogPosteriorEval b = post.log_posterior(theta, 0.13);
  CHECK(a.value == b.value);  // bitwise
  CHECK(a.forward.k0_hat == b.forward.k0_hat);
}
