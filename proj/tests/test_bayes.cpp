#include "doctest.h"
#include "helpers.hpp"

#include "hazard/bayes.hpp"
#include "hazard/parametric.hpp"
#include "hazard/rng.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace hazard;

namespace {

double prior_term(double x, double sd) { return -0.5 * (x / sd) * (x / sd); }

// Synthetic covariate-free Weibull sample.
testutil::SurvSample weibull_sample(std::uint64_t seed, int n, double zeta, double lambda) {
  Rng rng(seed);
  return testutil::random_survival(rng, n, 0.15, zeta, lambda);
}

BayesFit identical_draw_fit(double log_shape, double intercept, int n_draws) {
  BayesFit fit;
  fit.model = BayesModel::kWeibull;
  Eigen::RowVectorXd draw(2);
  draw << log_shape, intercept;
  fit.merged.draws = draw.replicate(n_draws, 1);
  fit.merged.param_names = {"log_shape", "intercept"};
  return fit;
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("weibull posterior is likelihood plus prior, term by term") {
  Rng rng(83);
  auto s = weibull_sample(821, 12, 1.4, 30.0);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd params(2);
    params << rng.uniform(-0.6, 0.8), rng.uniform(2.5, 4.0);
    const double want = weibull_loglik(std::exp(params[0]), std::exp(params[1]),
                                       s.times, s.events) +
                        prior_term(params[0], 1.0) + prior_term(params[1], 10.0);
    const double got = weibull_logposterior(params, s.times, s.events);
    CHECK(std::abs(got - want) < 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("posterior with the prior subtracted peaks at the MLE") {
  auto s = weibull_sample(823, 300, 1.5, 40.0);
  auto mle = fit_weibull_mle(s.times, s.events);
  double best = -std::numeric_limits<double>::infinity();
  double best_shape = 0, best_scale = 0;
  const int res = 41;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const double zeta = mle.shape * (0.95 + 0.1 * i / (res - 1.0));
      const double lambda = mle.scale * (0.95 + 0.1 * j / (res - 1.0));
      Eigen::VectorXd p(2);
      p << std::log(zeta), std::log(lambda);
      const double flat = weibull_logposterior(p, s.times, s.events) -
                          prior_term(p[0], 1.0) - prior_term(p[1], 10.0);
      if (flat > best) {
        best = flat;
        best_shape = zeta;
        best_scale = lambda;
      }
    }
  }
  // Grid spacing is 0.25% of the value, so the argmax lands on the center cell.
  CHECK(best_shape == doctest::Approx(mle.shape).epsilon(0.003));
  CHECK(best_scale == doctest::Approx(mle.scale).epsilon(0.003));
}

TEST_CASE("invalid encodings collapse to negative infinity") {
  auto s = weibull_sample(827, 5, 1.2, 20.0);
  Eigen::VectorXd nan_params(2);
  nan_params << std::numeric_limits<double>::quiet_NaN(), 3.0;
  CHECK(weibull_logposterior(nan_params, s.times, s.events) ==
        -std::numeric_limits<double>::infinity());
  Eigen::VectorXd overflow(2);
  overflow << 20.0, -10.0;  // cumulative hazard overflows the exp guard
  CHECK(weibull_logposterior(overflow, s.times, s.events) ==
        -std::numeric_limits<double>::infinity());
  Eigen::VectorXd wrong_size(3);
  wrong_size.setZero();
  CHECK(weibull_logposterior(wrong_size, s.times, s.events) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("aft posterior against the naive oracle") {
  Rng rng(89);
  auto design = testutil::random_design(rng, 10, 2, 0.3);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd params(4);
    params << rng.uniform(-0.5, 0.7), rng.uniform(2.0, 4.0), rng.uniform(-0.8, 0.8),
        rng.uniform(-0.8, 0.8);
    double want = testutil::naive_aft_loglik(std::exp(params[0]), params.tail(3), design) +
                  prior_term(params[0], 1.0);
    for (int j = 1; j < 4; ++j) want += prior_term(params[j], 10.0);
    const double got = aft_logposterior(params, design);
    CHECK(std::abs(got - want) < 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("covariate-free aft posterior nests the weibull one") {
  auto s = weibull_sample(829, 20, 1.3, 25.0);
  auto design = testutil::make_design(Eigen::MatrixXd(s.times.size(), 0), s.times, s.events);
  Eigen::VectorXd params(2);
  params << 0.3, 3.2;
  // Prior terms sum in a different association order on the two paths.
  CHECK(aft_logposterior(params, design) ==
        doctest::Approx(weibull_logposterior(params, s.times, s.events)).epsilon(1e-15));
}

TEST_CASE("non-finite parameter rejects the aft posterior") {
  Rng rng(91);
  auto design = testutil::random_design(rng, 8, 2, 0.2);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(4);
  params[2] = std::numeric_limits<double>::infinity();
  CHECK(aft_logposterior(params, design) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("marginal survival closed-form point") {
  FrailtySpec spec;
  spec.shape = 1.0;
  spec.theta = 1.0;
  spec.beta = Eigen::VectorXd::Zero(1);  // lambda = 1
  const Eigen::VectorXd x(0);
  CHECK(frailty_marginal_survival(spec, x, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(frailty_marginal_survival(spec, x, 0.0) == 1.0);
  spec.theta = -1.0;
  CHECK_THROWS_AS(frailty_marginal_survival(spec, x, 1.0), std::runtime_error);
}

TEST_CASE("huge precision reduces to the plain survival") {
  Rng rng(97);
  const Eigen::VectorXd x(0);
  for (int rep = 0; rep < 10; ++rep) {
    FrailtySpec spec;
    spec.shape = rng.uniform(0.6, 2.5);
    spec.beta = Eigen::VectorXd::Constant(1, rng.uniform(2.0, 4.0));
    spec.theta = 1e8;
    const double t = rng.uniform(1.0, 120.0);
    const double plain =
        weibull_survival(spec.shape, std::exp(spec.beta[0]), t);
    CHECK(std::abs(frailty_marginal_survival(spec, x, t) - plain) < 1e-6);
  }
}

TEST_CASE("marginal survival equals the gamma mixture integral") {
  Rng rng(101);
  const Eigen::VectorXd x(0);
  SUBCASE("fixed theta two") {
    for (int rep = 0; rep < 10; ++rep) {
      FrailtySpec spec;
      spec.shape = rng.uniform(0.6, 2.5);
      spec.beta = Eigen::VectorXd::Constant(1, rng.uniform(2.0, 4.0));
      spec.theta = 2.0;
      const double t = rng.uniform(1.0, 150.0);
      const double cum_haz =
          weibull_cumulative_hazard(spec.shape, std::exp(spec.beta[0]), t);
      const double want = testutil::gamma_mixture_survival(cum_haz, 2.0);
      CHECK(std::abs(frailty_marginal_survival(spec, x, t) - want) < 1e-8);
    }
  }
  SUBCASE("random theta") {
    for (int rep = 0; rep < 10; ++rep) {
      FrailtySpec spec;
      spec.shape = rng.uniform(0.6, 2.5);
      spec.beta = Eigen::VectorXd::Constant(1, rng.uniform(2.0, 4.0));
      spec.theta = rng.uniform(0.8, 5.0);
      const double t = rng.uniform(1.0, 150.0);
      const double cum_haz =
          weibull_cumulative_hazard(spec.shape, std::exp(spec.beta[0]), t);
      const double want = testutil::gamma_mixture_survival(cum_haz, spec.theta);
      CHECK(std::abs(frailty_marginal_survival(spec, x, t) - want) < 1e-8);
      CHECK(frailty_marginal_survival(spec, x, t) ==
            doctest::Approx(testutil::naive_frailty_survival(cum_haz, spec.theta))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("frailty posterior against the naive oracle") {
  Rng rng(103);
  auto design = testutil::random_design(rng, 10, 2, 0.3);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd params(5);
    params << rng.uniform(-0.5, 0.7), rng.uniform(2.0, 4.0), rng.uniform(-0.8, 0.8),
        rng.uniform(-0.8, 0.8), rng.uniform(-1.0, 1.2);
    double want = testutil::naive_frailty_loglik(std::exp(params[0]), params.segment(1, 3),
                                                 std::exp(params[4]), design) +
                  prior_term(params[0], 1.0) + prior_term(params[4], 1.5);
    for (int j = 1; j < 4; ++j) want += prior_term(params[j], 10.0);
    const double got = frailty_logposterior(params, design);
    CHECK(std::abs(got - want) < 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("frailty posterior nests the aft posterior at huge precision") {
  Rng rng(107);
  auto design = testutil::random_design(rng, 15, 2, 0.3);
  Eigen::VectorXd aft_params(4);
  aft_params << 0.25, 3.1, 0.4, -0.3;
  Eigen::VectorXd frailty_params(5);
  const double log_theta = std::log(1e8);
  frailty_params << aft_params, log_theta;
  // Strip the extra frailty-precision prior before comparing the stacks.
  const double frailty_part =
      frailty_logposterior(frailty_params, design) - prior_term(log_theta, 1.5);
  CHECK(std::abs(frailty_part - aft_logposterior(aft_params, design)) < 1e-4);
}

TEST_CASE("censored subject contributes only marginal survival") {
  Eigen::MatrixXd X(1, 1);
  X << 0.7;
  Eigen::VectorXd t(1);
  t << 12.0;
  Eigen::VectorXi e(1);
  e << 0;
  auto design = testutil::make_design(X, t, e);
  Eigen::VectorXd params(4);
  params << 0.2, 2.5, -0.4, 0.3;  // log zeta, intercept, beta, log theta
  const double theta = std::exp(params[3]);
  const double lambda = std::exp(params[1] + params[2] * 0.7);
  const double cum_haz = std::pow(12.0 / lambda, std::exp(params[0]));
  const double want = -theta * std::log1p(cum_haz / theta) + prior_term(params[0], 1.0) +
                      prior_term(params[1], 10.0) + prior_term(params[2], 10.0) +
                      prior_term(params[3], 1.5);
  CHECK(frailty_logposterior(params, design) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("frailty never raises the hazard") {
  Rng rng(109);
  const Eigen::VectorXd x(0);
  for (int rep = 0; rep < 20; ++rep) {
    FrailtySpec spec;
    spec.shape = rng.uniform(0.6, 2.5);
    spec.beta = Eigen::VectorXd::Constant(1, rng.uniform(2.0, 4.0));
    spec.theta = rng.uniform(0.3, 6.0);
    const double lambda = std::exp(spec.beta[0]);
    for (double t : {0.5, 5.0, 25.0, 80.0, 300.0}) {
      const double unfrail =
          spec.shape / lambda * std::pow(t / lambda, spec.shape - 1.0);
      CHECK(frailty_marginal_hazard(spec, x, t) <= unfrail * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("marginal median solves the half-survival equation") {
  Rng rng(113);
  const Eigen::VectorXd x(0);
  for (int rep = 0; rep < 10; ++rep) {
    FrailtySpec spec;
    spec.shape = rng.uniform(0.6, 2.5);
    spec.beta = Eigen::VectorXd::Constant(1, rng.uniform(2.0, 4.0));
    spec.theta = rng.uniform(0.4, 5.0);
    const double median = frailty_median_time(spec, x);
    CHECK(frailty_marginal_survival(spec, x, median) == doctest::Approx(0.5).epsilon(1e-12));
  }
  FrailtySpec spec;
  spec.shape = 1.6;
  spec.beta = Eigen::VectorXd::Constant(1, 3.0);
  spec.theta = 1e10;
  CHECK(frailty_median_time(spec, x) ==
        doctest::Approx(weibull_median(1.6, std::exp(3.0))).epsilon(1e-6));
}

TEST_CASE("predictive curve from identical draws has zero width") {
  auto fit = identical_draw_fit(std::log(1.4), std::log(30.0), 150);
  const Eigen::VectorXd x(0);
  auto curve = posterior_predictive_curve(fit, x, {0.0, 5.0, 20.0, 60.0});
  for (std::size_t j = 0; j < curve.mean.times.size(); ++j) {
    const double single = weibull_survival(1.4, 30.0, curve.mean.times[j]);
    CHECK(curve.mean.survival[j] == doctest::Approx(single).epsilon(1e-12));
    CHECK(curve.lower[j] == doctest::Approx(single).epsilon(1e-12));
    CHECK(curve.upper[j] == doctest::Approx(single).epsilon(1e-12));
  }
  CHECK(curve.mean.survival[0] == 1.0);  // t = 0
  CHECK(curve.lower[0] == 1.0);
  CHECK(curve.upper[0] == 1.0);
}

TEST_CASE("predictive curve needs enough draws") {
  auto fit = identical_draw_fit(0.0, 3.0, 99);
  const Eigen::VectorXd x(0);
  CHECK_THROWS_AS(posterior_predictive_curve(fit, x, {1.0}), std::runtime_error);
}

TEST_CASE("sampled posterior band straddles its own mean") {
  auto s = weibull_sample(831, 80, 1.4, 35.0);
  auto design = testutil::make_design(Eigen::MatrixXd(s.times.size(), 0), s.times, s.events);
  BayesFitConfig config;
  config.chains = 2;
  config.steps = 1500;
  config.burn = 500;
  config.seed = 19;
  auto fit = fit_bayes(BayesModel::kWeibull, design, config);
  const Eigen::VectorXd x(0);
  auto curve = posterior_predictive_curve(fit, x, {2.0, 10.0, 30.0, 70.0});
  for (std::size_t j = 0; j < curve.mean.times.size(); ++j) {
    CHECK(curve.lower[j] <= curve.mean.survival[j]);
    CHECK(curve.mean.survival[j] <= curve.upper[j]);
    CHECK(curve.lower[j] >= 0.0);
    CHECK(curve.upper[j] <= 1.0);
  }
}

TEST_CASE("sampler runs are reproducible and labeled") {
  Rng rng(127);
  auto design = testutil::random_design(rng, 40, 2, 0.25);
  BayesFitConfig config;
  config.chains = 2;
  config.steps = 800;
  config.burn = 300;
  config.seed = 5;
  auto a = fit_bayes(BayesModel::kAftFrailty, design, config);
  auto b = fit_bayes(BayesModel::kAftFrailty, design, config);
  CHECK((a.merged.draws.array() == b.merged.draws.array()).all());
  CHECK(a.merged.draws.rows() == 2 * 500);
  const std::vector<std::string> want = {"log_shape", "intercept", "beta_x1", "beta_x2",
                                         "log_theta"};
  CHECK(a.merged.param_names == want);
  CHECK(a.rhat.size() == 5);
  for (double acc : a.chain_acceptance) {
    CHECK(acc > 0.0);
    CHECK(acc < 1.0);
  }

  auto weibull = fit_bayes(BayesModel::kWeibull, design, config);
  CHECK(weibull.merged.param_names ==
        std::vector<std::string>{"log_shape", "intercept"});
}

TEST_CASE("posterior concentrates as the sample grows") {
  const double zeta = 1.4, lambda = 60.0;
  BayesFitConfig config;
  config.chains = 2;
  config.steps = 4000;
  config.burn = 1500;
  config.seed = 11;
  double err_small_shape = 0, err_big_shape = 0;
  double err_small_scale = 0, err_big_scale = 0;
  for (int which = 0; which < 2; ++which) {
    const int n = which == 0 ? 200 : 2000;
    auto s = weibull_sample(900 + static_cast<std::uint64_t>(which), n, zeta, lambda);
    auto design =
        testutil::make_design(Eigen::MatrixXd(s.times.size(), 0), s.times, s.events);
    auto fit = fit_bayes(BayesModel::kWeibull, design, config);
    const double shape_err = std::abs(fit.merged.draws.col(0).mean() - std::log(zeta));
    const double scale_err = std::abs(fit.merged.draws.col(1).mean() - std::log(lambda));
    if (which == 0) {
      err_small_shape = shape_err;
      err_small_scale = scale_err;
    } else {
      err_big_shape = shape_err;
      err_big_scale = scale_err;
    }
  }
  CHECK(err_big_shape < err_small_shape);
  CHECK(err_big_scale < err_small_scale);
}

TEST_CASE("posterior point predictions negate into risk scores") {
  auto fit = identical_draw_fit(std::log(2.0), std::log(50.0), 120);
  Eigen::MatrixXd X(2, 0);
  const Eigen::VectorXd medians = posterior_mean_median_times(fit, X);
  CHECK(medians[0] == doctest::Approx(50.0 * std::sqrt(std::log(2.0))).epsilon(1e-12));
  const Eigen::VectorXd risks = posterior_risk_scores(fit, X);
  CHECK(risks[0] == -medians[0]);
}

}  // TEST_SUITE
