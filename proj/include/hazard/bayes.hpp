#pragma once

#include "hazard/curve.hpp"
#include "hazard/dataset.hpp"
#include "hazard/mcmc.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hazard {

enum class BayesModel { kWeibull, kAft, kAftFrailty };

// Parameter vector layouts (all unconstrained):
//   weibull:     [log shape, intercept]
//   aft:         [log shape, intercept, beta_1..beta_p]
//   aft_frailty: [log shape, intercept, beta_1..beta_p, log theta]
// Priors: log shape ~ N(0, 1); intercept and betas ~ N(0, 10);
// log theta ~ N(0, 1.5). Normal(mean, sd) convention, unnormalized:
// each prior contributes -0.5 (x/sd)^2, constants dropped.

double weibull_logposterior(const Eigen::VectorXd& params,
                            const Eigen::VectorXd& times,
                            const Eigen::VectorXi& events);
double aft_logposterior(const Eigen::VectorXd& params, const DesignMatrix& design);
double frailty_logposterior(const Eigen::VectorXd& params, const DesignMatrix& design);

// Gamma(theta, theta) frailty integrated out of a Weibull AFT hazard:
//   S(t|x) = (1 + H(t|x)/theta)^(-theta),
//   h(t|x) = h_unfrail(t|x) / (1 + H(t|x)/theta).
struct FrailtySpec {
  double shape = 1.0;
  Eigen::VectorXd beta;  // intercept first
  double theta = 1.0;
};

double frailty_marginal_survival(const FrailtySpec& spec, const Eigen::VectorXd& x, double t);
double frailty_marginal_hazard(const FrailtySpec& spec, const Eigen::VectorXd& x, double t);

// Marginal median: H must reach theta*(2^(1/theta) - 1), closed form in t.
double frailty_median_time(const FrailtySpec& spec, const Eigen::VectorXd& x);

struct BayesFitConfig {
  int chains = 4;
  int steps = 20000;
  int burn = 5000;
  double target_acceptance = 0.30;
  std::uint64_t seed = 0;
};

struct BayesFit {
  BayesModel model = BayesModel::kAft;
  PosteriorSamples merged;               // all chains stacked in chain order
  std::vector<Eigen::MatrixXd> chains;
  Eigen::VectorXd rhat;                  // per parameter
  std::vector<double> chain_acceptance;
};

// Runs `chains` samplers with seeds seed, seed+1, ... and stacks the draws.
BayesFit fit_bayes(BayesModel model, const DesignMatrix& design, const BayesFitConfig& config);

// Point predictions: posterior mean of each subject's median survival time.
Eigen::VectorXd posterior_mean_median_times(const BayesFit& fit, const Eigen::MatrixXd& X);

// Posterior risk ranking: negated posterior mean median (higher = riskier).
Eigen::VectorXd posterior_risk_scores(const BayesFit& fit, const Eigen::MatrixXd& X);

struct PredictiveCurve {
  StepSurvivalCurve mean;        // pointwise posterior mean of S(t|x)
  std::vector<double> lower;     // pointwise 2.5% quantile
  std::vector<double> upper;     // pointwise 97.5% quantile
};

PredictiveCurve posterior_predictive_curve(const BayesFit& fit,
                                           const Eigen::VectorXd& x,
                                           const std::vector<double>& time_grid);

}  // namespace hazard
