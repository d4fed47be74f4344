#pragma once

#include "hazard/dataset.hpp"

#include <Eigen/Dense>
#include <vector>

namespace hazard {

// Weibull with shape zeta and scale lambda (days):
//   h(t) = (zeta / lambda^zeta) t^(zeta-1),  S(t) = exp(-(t/lambda)^zeta).
struct WeibullFit {
  double shape = 1.0;
  double scale = 1.0;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

// AFT variant: lambda_i = exp(beta0 + beta . x_i); beta holds the intercept
// first, then one coefficient per design column.
struct AftFit {
  double shape = 1.0;
  Eigen::VectorXd beta;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

double weibull_loglik(double shape, double scale,
                      const Eigen::VectorXd& times, const Eigen::VectorXi& events);
double weibull_survival(double shape, double scale, double t);
double weibull_cumulative_hazard(double shape, double scale, double t);
double weibull_median(double shape, double scale);

// Censored MLE in (log shape, log scale) space; quasi-Newton with backtracking,
// gradient infinity-norm < 1e-6 or 500 iterations.
WeibullFit fit_weibull_mle(const Eigen::VectorXd& times, const Eigen::VectorXi& events);

// Analytic gradient of the log-likelihood in (log shape, log scale).
Eigen::Vector2d weibull_loglik_gradient(double log_shape, double log_scale,
                                        const Eigen::VectorXd& times,
                                        const Eigen::VectorXi& events);

double aft_loglik(double shape, const Eigen::VectorXd& beta, const DesignMatrix& design);
AftFit fit_weibull_aft_mle(const DesignMatrix& design);

// Analytic gradient in (log shape, intercept, coefficients) order.
Eigen::VectorXd aft_loglik_gradient(double log_shape, const Eigen::VectorXd& beta,
                                    const DesignMatrix& design);

double aft_lambda(const AftFit& fit, const Eigen::VectorXd& x);
double aft_survival(const AftFit& fit, const Eigen::VectorXd& x, double t);
double aft_median_time(const AftFit& fit, const Eigen::VectorXd& x);

struct ContourGrid {
  std::vector<double> shapes;
  std::vector<double> scales;
  Eigen::MatrixXd rel_lik;  // shapes x scales, values in (0,1]
  bool range_excludes_mle = false;
};

// exp(loglik(z,l) - loglik at the MLE) over a rectangular grid.
ContourGrid relative_likelihood_grid(const Eigen::VectorXd& times,
                                     const Eigen::VectorXi& events,
                                     double shape_lo, double shape_hi,
                                     double scale_lo, double scale_hi,
                                     int resolution);

}  // namespace hazard
