#pragma once

#include "hazard/curve.hpp"
#include "hazard/dataset.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hazard {

// Breslow baseline pieces: increments d_j / sum_{R(t_j)} exp(beta.x) build the
// cumulative hazard; the interval rate form
//   h0(t_j) = (1 - xi_j) / (t_{j+1} - t_j),  xi_j = exp(-d_j / sum exp(beta.x))
// is kept alongside. The last interval closes at the maximum observed time.
struct BaselineHazard {
  std::vector<double> event_times;
  std::vector<double> increments;        // cumulative-hazard jumps
  std::vector<double> cumulative;        // running sum of increments
  std::vector<double> interval_rate;     // (1 - xi_j) / (t_{j+1} - t_j)
  bool degenerate_last_interval = false; // t_{r+1} == t_r
};

struct CoxFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd standard_errors;
  double loglik_partial = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Breslow-tied partial log-likelihood.
double cox_partial_loglik(const Eigen::VectorXd& beta, const DesignMatrix& design);

struct CoxDerivatives {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Value, score, and (negative-definite) Hessian at beta.
CoxDerivatives cox_partial_derivatives(const Eigen::VectorXd& beta, const DesignMatrix& design);

// Same likelihood with per-subject log-risks in place of beta.x; shared by the
// network-risk model.
double cox_partial_loglik_risks(const Eigen::VectorXd& log_risks, const DesignMatrix& design);

// Newton-Raphson from beta = 0 with step halving; gradient infinity-norm
// < 1e-8. Monotone-likelihood divergence (|beta| beyond the bound) throws.
CoxFit fit_coxph(const DesignMatrix& design, double divergence_bound = 50.0);

BaselineHazard breslow_baseline(const CoxFit& fit, const DesignMatrix& design);

// Baseline from arbitrary per-subject log-risks.
BaselineHazard breslow_baseline_from_risks(const Eigen::VectorXd& log_risks,
                                           const DesignMatrix& design);

// S(t|x) = exp(-H0(t) exp(beta.x)), H0 step-interpolated right-continuously.
double cox_predict_survival(const CoxFit& fit, const BaselineHazard& baseline,
                            const Eigen::VectorXd& x, double t);

StepSurvivalCurve cox_survival_curve(const CoxFit& fit, const BaselineHazard& baseline,
                                     const Eigen::VectorXd& x);

struct HazardRatioRow {
  std::string covariate;
  double hazard_ratio = 1.0;  // per raw covariate unit
  double ci_lower = 1.0;
  double ci_upper = 1.0;
};

// exp(beta_j / sd_j) with Wald 95% bounds, back-transformed to the original
// covariate units via the training standardization.
std::vector<HazardRatioRow> hazard_ratios(const CoxFit& fit, const Standardization& st);

}  // namespace hazard
