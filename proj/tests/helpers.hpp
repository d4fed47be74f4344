#pragma once

#include "hazard/dataset.hpp"
#include "hazard/rng.hpp"

#include <Eigen/Dense>
#include <functional>
#include <string>

// Shared fixtures, naive reference oracles, and random-input generators.
// Oracles use direct textbook formulas and plain loops on purpose, staying
// independent of the library's log-space implementations.
namespace testutil {

inline std::string gbsg_path() { return GBSG_CSV_PATH; }

struct GbsgSplit {
  hazard::SurvivalDataset full;
  hazard::SurvivalDataset train;
  hazard::SurvivalDataset test;
  hazard::DesignMatrix train_design;  // ordinal encoding, train statistics
  hazard::DesignMatrix test_design;
};

// Loaded once per binary.
const GbsgSplit& gbsg();

// DesignMatrix for synthetic inputs; columns named x1..xp, no scaling.
hazard::DesignMatrix make_design(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& times,
                                 const Eigen::VectorXi& events);

double naive_weibull_loglik(double zeta, double lambda,
                            const Eigen::VectorXd& times,
                            const Eigen::VectorXi& events);

// beta[0] is the intercept.
double naive_aft_loglik(double zeta, const Eigen::VectorXd& beta,
                        const hazard::DesignMatrix& design);

double naive_frailty_loglik(double zeta, const Eigen::VectorXd& beta, double theta,
                            const hazard::DesignMatrix& design);

double naive_cox_partial(const Eigen::VectorXd& beta, const hazard::DesignMatrix& design);

// (1 + H/theta)^(-theta) by direct pow.
double naive_frailty_survival(double cum_haz, double theta);

// Integral over z of exp(-z H) times the Gamma(theta, theta) density,
// adaptive Simpson in log-z to tolerance well below 1e-10.
double gamma_mixture_survival(double cum_haz, double theta);

struct BruteConcordance {
  double c_index = 0.0;
  unsigned long long pairs = 0;
};

BruteConcordance brute_concordance(const Eigen::VectorXd& predicted,
                                   const Eigen::VectorXd& observed,
                                   const Eigen::VectorXi& events);

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step);

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, double step);

// max_i |got_i - want_i| / max(1, |want_i|)
double max_rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want);

struct SurvSample {
  Eigen::VectorXd times;
  Eigen::VectorXi events;
};

// Weibull(shape, scale) event times; a censor_frac share of subjects is cut
// back to a uniform fraction of its drawn time.
SurvSample random_survival(hazard::Rng& rng, int n, double censor_frac,
                           double shape = 1.3, double scale = 50.0);

// Standard-normal covariates with AFT-generated times.
hazard::DesignMatrix random_design(hazard::Rng& rng, int n, int p, double censor_frac);

}  // namespace testutil
