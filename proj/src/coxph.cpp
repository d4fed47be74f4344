#include "hazard/coxph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hazard {

namespace {

// Rows sorted by descending time so risk sets accumulate as prefix sums;
// groups are maximal runs of tied times.
struct RiskOrder {
  std::vector<int> order;                    // row indices, time descending
  std::vector<std::pair<int, int>> groups;   // [begin, end) into order
};

RiskOrder risk_order(const DesignMatrix& design) {
  RiskOrder ro;
  ro.order.resize(static_cast<std::size_t>(design.n()));
  std::iota(ro.order.begin(), ro.order.end(), 0);
  std::stable_sort(ro.order.begin(), ro.order.end(), [&](int a, int b) {
    return design.times[a] > design.times[b];
  });
  int i = 0;
  const int n = static_cast<int>(design.n());
  while (i < n) {
    int j = i;
    while (j < n && design.times[ro.order[static_cast<std::size_t>(j)]] ==
                        design.times[ro.order[static_cast<std::size_t>(i)]]) {
      ++j;
    }
    ro.groups.emplace_back(i, j);
    i = j;
  }
  return ro;
}

struct PartialLik {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // of the log-likelihood (negative semi-definite)
};

PartialLik partial_lik(const Eigen::VectorXd& beta, const DesignMatrix& design,
                       bool with_derivatives) {
  const Eigen::Index p = design.p();
  auto ro = risk_order(design);

  PartialLik out;
  out.gradient = Eigen::VectorXd::Zero(p);
  out.hessian = Eigen::MatrixXd::Zero(p, p);

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);

  for (const auto& [begin, end] : ro.groups) {
    int deaths = 0;
    Eigen::VectorXd death_sum = Eigen::VectorXd::Zero(p);
    double death_lp = 0.0;
    for (int k = begin; k < end; ++k) {
      const int row = ro.order[static_cast<std::size_t>(k)];
      const Eigen::VectorXd x = design.X.row(row);
      const double w = std::exp(beta.dot(x));
      s0 += w;
      if (with_derivatives) {
        s1 += w * x;
        s2 += w * x * x.transpose();
      }
      if (design.events[row]) {
        ++deaths;
        death_lp += beta.dot(x);
        if (with_derivatives) death_sum += x;
      }
    }
    if (deaths > 0) {
      out.loglik += death_lp - deaths * std::log(s0);
      if (with_derivatives) {
        const Eigen::VectorXd mean = s1 / s0;
        out.gradient += death_sum - deaths * mean;
        out.hessian -= deaths * (s2 / s0 - mean * mean.transpose());
      }
    }
  }
  return out;
}

}  // namespace

double cox_partial_loglik(const Eigen::VectorXd& beta, const DesignMatrix& design) {
  if (beta.size() != design.p()) throw std::runtime_error("coefficient length mismatch");
  return partial_lik(beta, design, false).loglik;
}

CoxDerivatives cox_partial_derivatives(const Eigen::VectorXd& beta, const DesignMatrix& design) {
  if (beta.size() != design.p()) throw std::runtime_error("coefficient length mismatch");
  auto pl = partial_lik(beta, design, true);
  return {pl.loglik, std::move(pl.gradient), std::move(pl.hessian)};
}

double cox_partial_loglik_risks(const Eigen::VectorXd& log_risks, const DesignMatrix& design) {
  if (log_risks.size() != design.n()) throw std::runtime_error("risk length mismatch");
  auto ro = risk_order(design);
  double loglik = 0.0;
  double s0 = 0.0;
  for (const auto& [begin, end] : ro.groups) {
    int deaths = 0;
    double death_lp = 0.0;
    for (int k = begin; k < end; ++k) {
      const int row = ro.order[static_cast<std::size_t>(k)];
      s0 += std::exp(log_risks[row]);
      if (design.events[row]) {
        ++deaths;
        death_lp += log_risks[row];
      }
    }
    if (deaths > 0) loglik += death_lp - deaths * std::log(s0);
  }
  return loglik;
}

CoxFit fit_coxph(const DesignMatrix& design, double divergence_bound) {
  const Eigen::Index p = design.p();
  if (design.events.sum() < 1) throw std::runtime_error("no events");
  for (Eigen::Index j = 0; j < p; ++j) {
    if ((design.X.col(j).array() == design.X(0, j)).all()) {
      throw std::runtime_error("constant covariate column '" +
                               design.standardization.column_names[static_cast<std::size_t>(j)] +
                               "'");
    }
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double loglik = partial_lik(beta, design, false).loglik;

  CoxFit fit;
  for (int iter = 0; iter < 200; ++iter) {
    fit.iterations = iter;
    auto pl = partial_lik(beta, design, true);
    loglik = pl.loglik;
    if (pl.gradient.cwiseAbs().maxCoeff() < 1e-8) {
      fit.converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(-pl.hessian);
    if (solver.info() != Eigen::Success) throw std::runtime_error("singular hessian");
    const Eigen::VectorXd direction = solver.solve(pl.gradient);
    if (!direction.allFinite()) throw std::runtime_error("singular hessian");

    // Step halving until the partial likelihood improves.
    double step = 1.0;
    Eigen::VectorXd candidate;
    double candidate_ll = loglik;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      candidate = beta + step * direction;
      candidate_ll = partial_lik(candidate, design, false).loglik;
      if (std::isfinite(candidate_ll) && candidate_ll >= loglik) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    beta = candidate;
    if (beta.norm() > divergence_bound) {
      throw std::runtime_error("monotone likelihood: coefficients diverged beyond " +
                               std::to_string(divergence_bound));
    }
  }

  auto pl = partial_lik(beta, design, true);
  fit.converged = pl.gradient.cwiseAbs().maxCoeff() < 1e-8;
  if (!fit.converged) throw std::runtime_error("newton-raphson did not converge");

  fit.beta = beta;
  fit.loglik_partial = pl.loglik;
  Eigen::MatrixXd covariance = (-pl.hessian).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  fit.standard_errors = covariance.diagonal().cwiseSqrt();
  return fit;
}

BaselineHazard breslow_baseline(const CoxFit& fit, const DesignMatrix& design) {
  Eigen::VectorXd log_risks(design.n());
  for (Eigen::Index i = 0; i < design.n(); ++i) log_risks[i] = fit.beta.dot(design.X.row(i));
  return breslow_baseline_from_risks(log_risks, design);
}

BaselineHazard breslow_baseline_from_risks(const Eigen::VectorXd& log_risks,
                                           const DesignMatrix& design) {
  const Eigen::Index n = design.n();
  if (log_risks.size() != n) throw std::runtime_error("risk length mismatch");
  Eigen::VectorXd risk = log_risks.array().exp();

  // Ascending distinct event times with their death counts.
  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  std::stable_sort(rows.begin(), rows.end(),
                   [&](int a, int b) { return design.times[a] < design.times[b]; });

  BaselineHazard base;
  double max_time = design.times.maxCoeff();
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    int deaths = 0;
    const double t = design.times[rows[i]];
    while (j < rows.size() && design.times[rows[j]] == t) {
      deaths += design.events[rows[j]];
      ++j;
    }
    if (deaths > 0) {
      double denom = 0.0;
      for (std::size_t k = i; k < rows.size(); ++k) denom += risk[rows[k]];
      base.event_times.push_back(t);
      base.increments.push_back(deaths / denom);
      base.cumulative.push_back((base.cumulative.empty() ? 0.0 : base.cumulative.back()) +
                                deaths / denom);
      // interval-rate form, next interval boundary filled in below
      base.interval_rate.push_back(1.0 - std::exp(-deaths / denom));
    }
    i = j;
  }

  for (std::size_t k = 0; k < base.event_times.size(); ++k) {
    const double next =
        k + 1 < base.event_times.size() ? base.event_times[k + 1] : max_time;
    const double width = next - base.event_times[k];
    if (width > 0.0) {
      base.interval_rate[k] /= width;
    } else {
      base.degenerate_last_interval = true;
    }
  }
  return base;
}

double cox_predict_survival(const CoxFit& fit, const BaselineHazard& baseline,
                            const Eigen::VectorXd& x, double t) {
  if (x.size() != fit.beta.size()) throw std::runtime_error("covariate length mismatch");
  auto it = std::upper_bound(baseline.event_times.begin(), baseline.event_times.end(), t);
  if (it == baseline.event_times.begin()) return 1.0;
  const double h0 = baseline.cumulative[static_cast<std::size_t>(it - baseline.event_times.begin()) - 1];
  return std::exp(-h0 * std::exp(fit.beta.dot(x)));
}

StepSurvivalCurve cox_survival_curve(const CoxFit& fit, const BaselineHazard& baseline,
                                     const Eigen::VectorXd& x) {
  const double risk = std::exp(fit.beta.dot(x));
  StepSurvivalCurve curve;
  curve.times = baseline.event_times;
  for (double h0 : baseline.cumulative) curve.survival.push_back(std::exp(-h0 * risk));
  curve.at_risk.assign(curve.times.size(), 0);
  curve.events_at.assign(curve.times.size(), 0);
  return curve;
}

std::vector<HazardRatioRow> hazard_ratios(const CoxFit& fit, const Standardization& st) {
  std::vector<HazardRatioRow> rows;
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    HazardRatioRow r;
    r.covariate = st.column_names[static_cast<std::size_t>(j)];
    const double scale = st.sd[j];
    r.hazard_ratio = std::exp(fit.beta[j] / scale);
    r.ci_lower = std::exp((fit.beta[j] - 1.96 * fit.standard_errors[j]) / scale);
    r.ci_upper = std::exp((fit.beta[j] + 1.96 * fit.standard_errors[j]) / scale);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hazard
