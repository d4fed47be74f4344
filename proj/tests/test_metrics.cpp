#include "doctest.h"
#include "helpers.hpp"

#include "hazard/metrics.hpp"
#include "hazard/nonparametric.hpp"
#include "hazard/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace hazard;

namespace {

Eigen::VectorXd to_vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

Eigen::VectorXi to_ivec(std::initializer_list<int> xs) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (int x : xs) v[k++] = x;
  return v;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("perfect and uninformative rankings") {
  const auto t = to_vec({1, 2, 3, 4, 5, 6});
  const auto e = to_ivec({1, 1, 1, 1, 1, 1});
  auto perfect = concordance_index(t, t, e);
  CHECK(perfect.c_index == 1.0);
  CHECK(perfect.comparable_pairs == 15);

  auto flat = concordance_index(Eigen::VectorXd::Constant(6, 7.0), t, e);
  CHECK(flat.c_index == 0.5);
  CHECK(flat.comparable_pairs == 15);
}

TEST_CASE("tie conventions on a worked example") {
  const auto observed = to_vec({5, 10, 10, 15, 20});
  const auto predicted = to_vec({6, 9, 11, 14, 22});
  const auto events = to_ivec({1, 1, 0, 1, 0});
  auto r = concordance_index(predicted, observed, events);
  // The event at 10 pairs with the same-time censoring; the censored 10 drops
  // against later subjects; everything comparable ranks correctly.
  CHECK(r.c_index == 1.0);
  CHECK(r.comparable_pairs == 8);
}

TEST_CASE("frozen medium-size concordance value") {
  const auto observed = to_vec({5,  38, 33, 22, 22, 43, 5,  35, 10, 5,
                                26, 48, 37, 38, 36, 39, 26, 7,  42, 23,
                                25, 19, 9,  46, 39, 32, 20, 41, 27, 22});
  const auto predicted = to_vec({22, 40, 42, 19, 45, 15, 12, 34, 32, 7,
                                 41, 10, 40, 1,  40, 39, 39, 33, 24, 35,
                                 14, 39, 28, 23, 25, 28, 2,  7,  13, 6});
  const auto events = to_ivec({1, 1, 1, 0, 1, 0, 1, 0, 0, 0, 1, 1, 1, 1, 1,
                               0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 1, 0});
  auto r = concordance_index(predicted, observed, events);
  CHECK(r.c_index == 0.4154929577464789);
  CHECK(r.comparable_pairs == 284);
}

TEST_CASE("agrees exactly with the brute-force pair loop") {
  Rng rng(701);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(49));
    Eigen::VectorXd observed(n), predicted(n);
    Eigen::VectorXi events(n);
    bool any_event = false;
    for (int i = 0; i < n; ++i) {
      observed[i] = 1.0 + static_cast<double>(rng.below(12));  // heavy time ties
      predicted[i] = std::floor(rng.uniform(0.0, 20.0));       // prediction ties too
      events[i] = rng.uniform() < 0.6 ? 1 : 0;
      any_event |= events[i] != 0;
    }
    if (!any_event) events[0] = 1;
    testutil::BruteConcordance want;
    bool comparable = true;
    try {
      want = testutil::brute_concordance(predicted, observed, events);
    } catch (const std::runtime_error&) {
      comparable = false;
    }
    if (!comparable) {
      CHECK_THROWS_AS(concordance_index(predicted, observed, events), std::runtime_error);
      continue;
    }
    auto got = concordance_index(predicted, observed, events);
    CHECK(got.c_index == want.c_index);
    CHECK(got.comparable_pairs == static_cast<std::uint64_t>(want.pairs));
  }
}

TEST_CASE("degenerate concordance inputs throw") {
  CHECK_THROWS_AS(concordance_index(to_vec({1.0}), to_vec({5.0}), to_ivec({1})),
                  std::runtime_error);
  CHECK_THROWS_AS(concordance_index(to_vec({1, 2, 3}), to_vec({5, 6, 7}),
                                    to_ivec({0, 0, 0})),
                  std::runtime_error);
  CHECK_THROWS_AS(concordance_index(to_vec({1, 2}), to_vec({5, 6, 7}),
                                    to_ivec({1, 1, 1})),
                  std::runtime_error);
}

TEST_CASE("ranking survives monotone relabeling and mirrors under reversal") {
  Rng rng(709);
  const int n = 25;
  Eigen::VectorXd observed(n), predicted(n);
  Eigen::VectorXi events(n);
  for (int i = 0; i < n; ++i) {
    observed[i] = 1.0 + static_cast<double>(rng.below(10));
    predicted[i] = rng.uniform(0.0, 50.0);  // continuous: no prediction ties
    events[i] = rng.uniform() < 0.7 ? 1 : 0;
  }
  events[0] = 1;
  auto base = concordance_index(predicted, observed, events);

  const Eigen::VectorXd scaled = (predicted.array() * 3.0 + 11.0).matrix();
  auto same = concordance_index(scaled, observed, events);
  CHECK(same.c_index == base.c_index);
  CHECK(same.comparable_pairs == base.comparable_pairs);

  auto flipped = concordance_index((-predicted).eval(), observed, events);
  CHECK(flipped.comparable_pairs == base.comparable_pairs);
  CHECK(std::abs(flipped.c_index + base.c_index - 1.0) < 1e-15);
}

TEST_CASE("error on uncensored subjects only") {
  const auto t = to_vec({100, 200});
  const auto e = to_ivec({1, 1});
  CHECK(rmse_uncensored(t, t, e) == 0.0);
  CHECK(rmse_uncensored(to_vec({110, 190}), t, e) == 10.0);

  const auto padded_pred = to_vec({110, 190, 5000, 1.0});
  const auto padded_obs = to_vec({100, 200, 7, 9});
  const auto padded_ev = to_ivec({1, 1, 0, 0});
  CHECK(rmse_uncensored(padded_pred, padded_obs, padded_ev) == 10.0);

  Rng rng(719);
  const int n = 30;
  Eigen::VectorXd pred(n), obs(n);
  Eigen::VectorXi ev(n);
  for (int i = 0; i < n; ++i) {
    pred[i] = rng.uniform(0.0, 100.0);
    obs[i] = rng.uniform(1.0, 100.0);
    ev[i] = rng.uniform() < 0.6 ? 1 : 0;
  }
  ev[5] = 1;
  Eigen::VectorXd pred_r = pred.reverse();
  Eigen::VectorXd obs_r = obs.reverse();
  Eigen::VectorXi ev_r = ev.reverse();
  CHECK(rmse_uncensored(pred_r, obs_r, ev_r) ==
        doctest::Approx(rmse_uncensored(pred, obs, ev)).epsilon(1e-12));

  CHECK_THROWS_AS(rmse_uncensored(pred, obs, Eigen::VectorXi::Zero(n)),
                  std::runtime_error);
  CHECK_THROWS_AS(rmse_uncensored(pred.head(5), obs, ev), std::runtime_error);
}

TEST_CASE("normal quantile accuracy and shape") {
  CHECK(z_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(z_quantile(0.5) == 0.0);
  CHECK(z_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-9));

  double prev = -1e9;
  for (double p = 0.001; p < 0.9995; p += 0.007) {
    const double z = z_quantile(p);
    CHECK(z > prev);
    prev = z;
    CHECK(std::abs(z + z_quantile(1.0 - p)) < 1e-9);
    // Round trip through the normal CDF.
    CHECK(0.5 * std::erfc(-z / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-9));
  }

  CHECK_THROWS_AS(z_quantile(0.0), std::runtime_error);
  CHECK_THROWS_AS(z_quantile(1.0), std::runtime_error);
  CHECK_THROWS_AS(z_quantile(-0.2), std::runtime_error);
  CHECK_THROWS_AS(z_quantile(1.2), std::runtime_error);
}

TEST_CASE("log-minus-log interval worked example") {
  StepSurvivalCurve curve;
  curve.times = {10.0};
  curve.survival = {std::exp(-1.0)};
  const double sd = 0.1;
  auto band = cloglog_confidence_band(curve, {sd * sd}, 0.05);
  const double z = z_quantile(0.975);
  const double s_cl = sd / (std::exp(-1.0) * 1.0);
  CHECK(band.lower[0] ==
        doctest::Approx(std::exp(-std::exp(z * s_cl))).epsilon(1e-10));
  CHECK(band.upper[0] ==
        doctest::Approx(std::exp(-std::exp(-z * s_cl))).epsilon(1e-10));
  CHECK_FALSE(band.skipped[0]);
  CHECK(band.lower[0] < curve.survival[0]);
  CHECK(curve.survival[0] < band.upper[0]);

  auto tight = cloglog_confidence_band(curve, {0.0}, 0.05);
  CHECK(tight.lower[0] == curve.survival[0]);
  CHECK(tight.upper[0] == curve.survival[0]);
  CHECK_FALSE(tight.skipped[0]);
}

TEST_CASE("degenerate survival points are carried, not banded") {
  StepSurvivalCurve curve;
  curve.times = {1.0, 2.0, 3.0};
  curve.survival = {1.0, 0.5, 0.0};
  auto band = cloglog_confidence_band(curve, {0.01, 0.01, 0.01}, 0.05);
  CHECK(band.skipped[0]);
  CHECK(band.lower[0] == 1.0);
  CHECK(band.upper[0] == 1.0);
  CHECK_FALSE(band.skipped[1]);
  CHECK(band.skipped[2]);
  CHECK(band.lower[2] == 0.0);
  CHECK(band.upper[2] == 0.0);

  CHECK_THROWS_AS(cloglog_confidence_band(curve, {0.01, 0.01, 0.01}, 0.0),
                  std::runtime_error);
  CHECK_THROWS_AS(cloglog_confidence_band(curve, {0.01, 0.01, 0.01}, 1.0),
                  std::runtime_error);
  CHECK_THROWS_AS(cloglog_confidence_band(curve, {0.01}, 0.05), std::runtime_error);
}

TEST_CASE("training curve band brackets the estimate and widens with confidence") {
  const auto& g = testutil::gbsg();
  std::vector<double> t(g.train_design.times.data(),
                        g.train_design.times.data() + g.train_design.n());
  std::vector<int> e(g.train_design.events.data(),
                     g.train_design.events.data() + g.train_design.n());
  auto curve = kaplan_meier(t, e);
  auto gw = greenwood_variance(curve);
  auto narrow = cloglog_confidence_band(curve, gw.variance, 0.10);
  auto wide = cloglog_confidence_band(curve, gw.variance, 0.01);
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    REQUIRE_FALSE(narrow.skipped[j]);
    CHECK(narrow.lower[j] <= curve.survival[j]);
    CHECK(curve.survival[j] <= narrow.upper[j]);
    // Shrinking the significance level never narrows the interval.
    CHECK(wide.lower[j] <= narrow.lower[j]);
    CHECK(narrow.upper[j] <= wide.upper[j]);
  }
}

TEST_CASE("evaluation report assembles metrics and raw columns") {
  const auto observed = to_vec({5, 10, 15, 20, 30});
  const auto predicted = to_vec({7, 9, 16, 18, 28});
  const auto risks = to_vec({3.0, 2.5, 2.0, 1.0, 0.5});
  const auto events = to_ivec({1, 1, 0, 1, 1});

  auto by_time = evaluate_model("demo", predicted, risks, observed, events,
                                RankBy::kPredictedTime);
  auto direct = concordance_index(predicted, observed, events);
  CHECK(by_time.model_name == "demo");
  CHECK(by_time.c_index == direct.c_index);
  CHECK(by_time.n_pairs_used == direct.comparable_pairs);
  CHECK(by_time.rmse == rmse_uncensored(predicted, observed, events));
  CHECK(by_time.n_uncensored_used == 4);
  CHECK(by_time.predicted_time == std::vector<double>{7, 9, 16, 18, 28});
  CHECK(by_time.risk_score == std::vector<double>{3.0, 2.5, 2.0, 1.0, 0.5});
  CHECK(by_time.observed_time == std::vector<double>{5, 10, 15, 20, 30});
  CHECK(by_time.status == std::vector<int>{1, 1, 0, 1, 1});

  // Risk ranking negates the scores; these risks mirror the predictions, so
  // the concordance is unchanged while the error column stays as given.
  auto by_risk = evaluate_model("demo", predicted, risks, observed, events,
                                RankBy::kRiskScore);
  CHECK(by_risk.c_index == by_time.c_index);
  CHECK(by_risk.rmse == by_time.rmse);

  // Deliberately inverted risks flip every comparable pair.
  auto inverted = evaluate_model("demo", predicted, (-risks).eval(), observed,
                                 events, RankBy::kRiskScore);
  CHECK(std::abs(inverted.c_index + by_time.c_index - 1.0) < 1e-15);
}

}  // TEST_SUITE
