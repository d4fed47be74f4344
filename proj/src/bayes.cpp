#include "hazard/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hazard {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_normal_prior(double x, double sd) { return -0.5 * (x / sd) * (x / sd); }

// Shared censored Weibull log-likelihood with per-subject eta = log lambda.
double weibull_ll_eta(double log_shape, const Eigen::VectorXd& eta,
                      const Eigen::VectorXd& times, const Eigen::VectorXi& events) {
  const double shape = std::exp(log_shape);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const double logu = std::log(times[i]) - eta[i];
    const double z = shape * logu;
    if (z > 700.0) return kNegInf;
    const double cum_haz = std::exp(z);
    if (events[i]) ll += log_shape - eta[i] + (shape - 1.0) * logu;
    ll -= cum_haz;
  }
  return ll;
}

double frailty_ll_eta(double log_shape, const Eigen::VectorXd& eta, double log_theta,
                      const Eigen::VectorXd& times, const Eigen::VectorXi& events) {
  const double shape = std::exp(log_shape);
  const double theta = std::exp(log_theta);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const double logu = std::log(times[i]) - eta[i];
    const double z = shape * logu;
    if (z > 700.0) return kNegInf;
    const double cum_haz = std::exp(z);
    const double log_shrink = std::log1p(cum_haz / theta);
    if (events[i]) {
      // log h_marg = log h_unfrail - log(1 + H/theta)
      ll += log_shape - eta[i] + (shape - 1.0) * logu - log_shrink;
    }
    ll -= theta * log_shrink;  // log S_marg
  }
  return ll;
}

bool params_finite(const Eigen::VectorXd& p) { return p.allFinite(); }

}  // namespace

double weibull_logposterior(const Eigen::VectorXd& params,
                            const Eigen::VectorXd& times,
                            const Eigen::VectorXi& events) {
  if (params.size() != 2 || !params_finite(params)) return kNegInf;
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(times.size(), params[1]);
  const double ll = weibull_ll_eta(params[0], eta, times, events);
  if (!std::isfinite(ll)) return kNegInf;
  return ll + log_normal_prior(params[0], 1.0) + log_normal_prior(params[1], 10.0);
}

double aft_logposterior(const Eigen::VectorXd& params, const DesignMatrix& design) {
  const Eigen::Index p = design.p();
  if (params.size() != p + 2 || !params_finite(params)) return kNegInf;
  Eigen::VectorXd eta =
      Eigen::VectorXd::Constant(design.n(), params[1]) + design.X * params.segment(2, p);
  const double ll = weibull_ll_eta(params[0], eta, design.times, design.events);
  if (!std::isfinite(ll)) return kNegInf;
  double prior = log_normal_prior(params[0], 1.0);
  for (Eigen::Index j = 1; j < p + 2; ++j) prior += log_normal_prior(params[j], 10.0);
  return ll + prior;
}

double frailty_logposterior(const Eigen::VectorXd& params, const DesignMatrix& design) {
  const Eigen::Index p = design.p();
  if (params.size() != p + 3 || !params_finite(params)) return kNegInf;
  Eigen::VectorXd eta =
      Eigen::VectorXd::Constant(design.n(), params[1]) + design.X * params.segment(2, p);
  const double ll = frailty_ll_eta(params[0], eta, params[p + 2], design.times, design.events);
  if (!std::isfinite(ll)) return kNegInf;
  double prior = log_normal_prior(params[0], 1.0) + log_normal_prior(params[p + 2], 1.5);
  for (Eigen::Index j = 1; j < p + 2; ++j) prior += log_normal_prior(params[j], 10.0);
  return ll + prior;
}

double frailty_marginal_survival(const FrailtySpec& spec, const Eigen::VectorXd& x, double t) {
  if (spec.theta <= 0) throw std::runtime_error("theta must be positive");
  if (t < 0) throw std::runtime_error("negative time");
  if (t == 0) return 1.0;
  const double lambda = std::exp(spec.beta[0] + spec.beta.tail(x.size()).dot(x));
  const double cum_haz = std::exp(spec.shape * (std::log(t) - std::log(lambda)));
  return std::exp(-spec.theta * std::log1p(cum_haz / spec.theta));
}

double frailty_marginal_hazard(const FrailtySpec& spec, const Eigen::VectorXd& x, double t) {
  if (spec.theta <= 0) throw std::runtime_error("theta must be positive");
  const double lambda = std::exp(spec.beta[0] + spec.beta.tail(x.size()).dot(x));
  const double cum_haz = std::exp(spec.shape * (std::log(t) - std::log(lambda)));
  const double hazard =
      spec.shape / lambda * std::exp((spec.shape - 1.0) * (std::log(t) - std::log(lambda)));
  return hazard / (1.0 + cum_haz / spec.theta);
}

double frailty_median_time(const FrailtySpec& spec, const Eigen::VectorXd& x) {
  const double lambda = std::exp(spec.beta[0] + spec.beta.tail(x.size()).dot(x));
  // Solve (1 + H/theta)^(-theta) = 1/2 for H, then invert H = (t/lambda)^shape.
  const double target_cum_haz = spec.theta * (std::pow(2.0, 1.0 / spec.theta) - 1.0);
  return lambda * std::pow(target_cum_haz, 1.0 / spec.shape);
}

namespace {

Eigen::VectorXd initial_point(BayesModel model, const DesignMatrix& design) {
  double event_mean = 0.0;
  int n_events = 0;
  for (Eigen::Index i = 0; i < design.n(); ++i) {
    if (design.events[i]) {
      event_mean += design.times[i];
      ++n_events;
    }
  }
  if (n_events == 0) throw std::runtime_error("no events");
  event_mean /= n_events;

  Eigen::Index dim = 2;
  if (model == BayesModel::kAft) dim = design.p() + 2;
  if (model == BayesModel::kAftFrailty) dim = design.p() + 3;
  Eigen::VectorXd init = Eigen::VectorXd::Zero(dim);
  init[1] = std::log(event_mean);
  return init;
}

std::vector<std::string> param_names(BayesModel model, const DesignMatrix& design) {
  std::vector<std::string> names = {"log_shape", "intercept"};
  if (model != BayesModel::kWeibull) {
    for (const auto& c : design.standardization.column_names) names.push_back("beta_" + c);
  }
  if (model == BayesModel::kAftFrailty) names.push_back("log_theta");
  return names;
}

}  // namespace

BayesFit fit_bayes(BayesModel model, const DesignMatrix& design, const BayesFitConfig& config) {
  LogDensity target;
  switch (model) {
    case BayesModel::kWeibull:
      target = [&design](const Eigen::VectorXd& p) {
        return weibull_logposterior(p, design.times, design.events);
      };
      break;
    case BayesModel::kAft:
      target = [&design](const Eigen::VectorXd& p) { return aft_logposterior(p, design); };
      break;
    case BayesModel::kAftFrailty:
      target = [&design](const Eigen::VectorXd& p) { return frailty_logposterior(p, design); };
      break;
  }

  const Eigen::VectorXd init = initial_point(model, design);

  BayesFit fit;
  fit.model = model;
  for (int c = 0; c < config.chains; ++c) {
    MhConfig mh;
    mh.steps = config.steps;
    mh.burn = config.burn;
    mh.target_acceptance = config.target_acceptance;
    mh.seed = config.seed + static_cast<std::uint64_t>(c);
    auto samples = mh_sample(target, init, mh);
    fit.chains.push_back(samples.draws);
    fit.chain_acceptance.push_back(samples.acceptance_rate);
  }

  const Eigen::Index kept = fit.chains[0].rows();
  const Eigen::Index dim = fit.chains[0].cols();
  fit.merged.draws.resize(kept * config.chains, dim);
  for (int c = 0; c < config.chains; ++c) {
    fit.merged.draws.middleRows(kept * c, kept) = fit.chains[static_cast<std::size_t>(c)];
  }
  fit.merged.param_names = param_names(model, design);
  fit.merged.n_burn = config.burn;
  fit.merged.seed = config.seed;
  fit.merged.chain_count = config.chains;
  fit.merged.acceptance_rate = 0.0;
  for (double a : fit.chain_acceptance) fit.merged.acceptance_rate += a;
  fit.merged.acceptance_rate /= config.chains;
  fit.rhat = split_rhat(fit.chains);
  return fit;
}

namespace {

// Median survival time for one posterior draw at covariate row x.
double draw_median(BayesModel model, const Eigen::VectorXd& draw, const Eigen::VectorXd& x) {
  const double shape = std::exp(draw[0]);
  double log_lambda = draw[1];
  if (model != BayesModel::kWeibull) log_lambda += draw.segment(2, x.size()).dot(x);
  const double lambda = std::exp(log_lambda);
  if (model == BayesModel::kAftFrailty) {
    const double theta = std::exp(draw[draw.size() - 1]);
    const double target = theta * (std::pow(2.0, 1.0 / theta) - 1.0);
    return lambda * std::pow(target, 1.0 / shape);
  }
  return lambda * std::pow(std::log(2.0), 1.0 / shape);
}

double draw_survival(BayesModel model, const Eigen::VectorXd& draw,
                     const Eigen::VectorXd& x, double t) {
  const double shape = std::exp(draw[0]);
  double log_lambda = draw[1];
  if (model != BayesModel::kWeibull) log_lambda += draw.segment(2, x.size()).dot(x);
  const double cum_haz = t <= 0 ? 0.0 : std::exp(shape * (std::log(t) - log_lambda));
  if (model == BayesModel::kAftFrailty) {
    const double theta = std::exp(draw[draw.size() - 1]);
    return std::exp(-theta * std::log1p(cum_haz / theta));
  }
  return std::exp(-cum_haz);
}

}  // namespace

Eigen::VectorXd posterior_mean_median_times(const BayesFit& fit, const Eigen::MatrixXd& X) {
  const Eigen::Index n_draws = fit.merged.draws.rows();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
  for (Eigen::Index d = 0; d < n_draws; ++d) {
    const Eigen::VectorXd draw = fit.merged.draws.row(d);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out[i] += draw_median(fit.model, draw, X.row(i));
    }
  }
  return out / static_cast<double>(n_draws);
}

Eigen::VectorXd posterior_risk_scores(const BayesFit& fit, const Eigen::MatrixXd& X) {
  return -posterior_mean_median_times(fit, X);
}

PredictiveCurve posterior_predictive_curve(const BayesFit& fit,
                                           const Eigen::VectorXd& x,
                                           const std::vector<double>& time_grid) {
  const Eigen::Index n_draws = fit.merged.draws.rows();
  if (n_draws < 100) throw std::runtime_error("needs at least 100 kept draws");

  PredictiveCurve out;
  out.mean.times = time_grid;
  std::vector<double> column(static_cast<std::size_t>(n_draws));
  for (double t : time_grid) {
    double mean = 0.0;
    for (Eigen::Index d = 0; d < n_draws; ++d) {
      const double s = draw_survival(fit.model, fit.merged.draws.row(d), x, t);
      column[static_cast<std::size_t>(d)] = s;
      mean += s;
    }
    mean /= static_cast<double>(n_draws);
    std::sort(column.begin(), column.end());
    auto quantile = [&](double q) {
      const double pos = q * (static_cast<double>(column.size()) - 1.0);
      const auto lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, column.size() - 1);
      const double frac = pos - static_cast<double>(lo);
      return column[lo] * (1.0 - frac) + column[hi] * frac;
    };
    out.mean.survival.push_back(mean);
    out.mean.at_risk.push_back(0);
    out.mean.events_at.push_back(0);
    out.lower.push_back(quantile(0.025));
    out.upper.push_back(quantile(0.975));
  }
  return out;
}

}  // namespace hazard
