#include "hazard/parametric.hpp"

#include "optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hazard {

namespace {

double mean_event_time(const Eigen::VectorXd& times, const Eigen::VectorXi& events) {
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (events[i]) {
      sum += times[i];
      ++n;
    }
  }
  if (n == 0) throw std::runtime_error("no events");
  return sum / n;
}

// Censored Weibull log-likelihood and gradient in (log shape, eta) terms where
// eta_i = log lambda_i. Shared by the null and AFT fits.
//   log u_i = log t_i - eta_i,  H_i = exp(shape * log u_i)
//   l = sum d_i (log shape - eta_i + (shape-1) log u_i) - H_i
//   dl/d log shape = sum d_i (1 + shape log u_i) - H_i shape log u_i
//   dl/d eta_i     = shape (H_i - d_i)... with sign: -d_i shape + shape H_i
struct EtaLoglik {
  double value = 0.0;
  double d_log_shape = 0.0;
  Eigen::VectorXd d_eta;
};

EtaLoglik eta_loglik(double log_shape, const Eigen::VectorXd& eta,
                     const Eigen::VectorXd& times, const Eigen::VectorXi& events) {
  const double shape = std::exp(log_shape);
  EtaLoglik out;
  out.d_eta = Eigen::VectorXd::Zero(times.size());
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const double logu = std::log(times[i]) - eta[i];
    const double cum_haz = std::exp(shape * logu);
    const double d = events[i] ? 1.0 : 0.0;
    out.value += d * (log_shape - eta[i] + (shape - 1.0) * logu) - cum_haz;
    out.d_log_shape += d * (1.0 + shape * logu) - cum_haz * shape * logu;
    out.d_eta[i] = shape * (cum_haz - d);
  }
  return out;
}

}  // namespace

double weibull_loglik(double shape, double scale,
                      const Eigen::VectorXd& times, const Eigen::VectorXi& events) {
  if (shape <= 0 || scale <= 0) throw std::runtime_error("shape and scale must be positive");
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(times.size(), std::log(scale));
  return eta_loglik(std::log(shape), eta, times, events).value;
}

double weibull_cumulative_hazard(double shape, double scale, double t) {
  if (t <= 0) return 0.0;
  return std::exp(shape * (std::log(t) - std::log(scale)));
}

double weibull_survival(double shape, double scale, double t) {
  return std::exp(-weibull_cumulative_hazard(shape, scale, t));
}

double weibull_median(double shape, double scale) {
  return scale * std::pow(std::log(2.0), 1.0 / shape);
}

WeibullFit fit_weibull_mle(const Eigen::VectorXd& times, const Eigen::VectorXi& events) {
  if (events.sum() < 2) throw std::runtime_error("needs at least 2 events");
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (times[i] <= 0) throw std::runtime_error("non-positive time");
  }

  Eigen::VectorXd x0(2);
  x0 << 0.0, std::log(mean_event_time(times, events));

  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(times.size(), x[1]);
    auto ll = eta_loglik(x[0], eta, times, events);
    grad.resize(2);
    grad[0] = -ll.d_log_shape;
    grad[1] = -ll.d_eta.sum();
    return -ll.value;
  };

  auto res = detail::minimize_bfgs(objective, x0, 1e-6, 500);
  if (!res.converged) {
    throw std::runtime_error("weibull MLE did not converge; last grad norm " +
                             std::to_string(res.grad_inf_norm));
  }
  WeibullFit fit;
  fit.shape = std::exp(res.x[0]);
  fit.scale = std::exp(res.x[1]);
  fit.loglik = -res.value;
  fit.converged = true;
  fit.iterations = res.iterations;
  return fit;
}

Eigen::Vector2d weibull_loglik_gradient(double log_shape, double log_scale,
                                        const Eigen::VectorXd& times,
                                        const Eigen::VectorXi& events) {
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(times.size(), log_scale);
  auto ll = eta_loglik(log_shape, eta, times, events);
  return {ll.d_log_shape, ll.d_eta.sum()};
}

double aft_loglik(double shape, const Eigen::VectorXd& beta, const DesignMatrix& design) {
  if (shape <= 0) throw std::runtime_error("shape must be positive");
  if (beta.size() != design.p() + 1) throw std::runtime_error("coefficient length mismatch");
  Eigen::VectorXd eta =
      Eigen::VectorXd::Constant(design.n(), beta[0]) + design.X * beta.tail(design.p());
  return eta_loglik(std::log(shape), eta, design.times, design.events).value;
}

Eigen::VectorXd aft_loglik_gradient(double log_shape, const Eigen::VectorXd& beta,
                                    const DesignMatrix& design) {
  if (beta.size() != design.p() + 1) throw std::runtime_error("coefficient length mismatch");
  Eigen::VectorXd eta =
      Eigen::VectorXd::Constant(design.n(), beta[0]) + design.X * beta.tail(design.p());
  auto ll = eta_loglik(log_shape, eta, design.times, design.events);
  Eigen::VectorXd grad(design.p() + 2);
  grad[0] = ll.d_log_shape;
  grad[1] = ll.d_eta.sum();
  grad.tail(design.p()) = design.X.transpose() * ll.d_eta;
  return grad;
}

AftFit fit_weibull_aft_mle(const DesignMatrix& design) {
  const Eigen::Index p = design.p();
  if (design.events.sum() < p + 2) throw std::runtime_error("too few events for the design");

  if (p > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
    if (qr.rank() < p) {
      std::string cols;
      for (Eigen::Index j = qr.rank(); j < p; ++j) {
        const auto k = static_cast<std::size_t>(qr.colsPermutation().indices()[j]);
        if (!cols.empty()) cols += ", ";
        cols += design.standardization.column_names[k];
      }
      throw std::runtime_error("design matrix is rank deficient (collinear: " + cols + ")");
    }
  }

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(p + 2);
  x0[1] = std::log(mean_event_time(design.times, design.events));

  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    Eigen::VectorXd eta =
        Eigen::VectorXd::Constant(design.n(), x[1]) + design.X * x.segment(2, p);
    auto ll = eta_loglik(x[0], eta, design.times, design.events);
    grad.resize(p + 2);
    grad[0] = -ll.d_log_shape;
    grad[1] = -ll.d_eta.sum();
    grad.segment(2, p) = -(design.X.transpose() * ll.d_eta);
    return -ll.value;
  };

  auto res = detail::minimize_bfgs(objective, x0, 1e-6, 500);
  if (!res.converged) {
    throw std::runtime_error("weibull AFT MLE did not converge; last grad norm " +
                             std::to_string(res.grad_inf_norm));
  }
  AftFit fit;
  fit.shape = std::exp(res.x[0]);
  fit.beta = res.x.tail(p + 1);
  fit.loglik = -res.value;
  fit.converged = true;
  fit.iterations = res.iterations;
  return fit;
}

double aft_lambda(const AftFit& fit, const Eigen::VectorXd& x) {
  if (x.size() + 1 != fit.beta.size()) throw std::runtime_error("covariate length mismatch");
  return std::exp(fit.beta[0] + fit.beta.tail(x.size()).dot(x));
}

double aft_survival(const AftFit& fit, const Eigen::VectorXd& x, double t) {
  return weibull_survival(fit.shape, aft_lambda(fit, x), t);
}

double aft_median_time(const AftFit& fit, const Eigen::VectorXd& x) {
  return weibull_median(fit.shape, aft_lambda(fit, x));
}

ContourGrid relative_likelihood_grid(const Eigen::VectorXd& times,
                                     const Eigen::VectorXi& events,
                                     double shape_lo, double shape_hi,
                                     double scale_lo, double scale_hi,
                                     int resolution) {
  if (resolution < 2) throw std::runtime_error("resolution must be at least 2");
  auto mle = fit_weibull_mle(times, events);

  ContourGrid grid;
  grid.range_excludes_mle = mle.shape < shape_lo || mle.shape > shape_hi ||
                            mle.scale < scale_lo || mle.scale > scale_hi;
  grid.shapes.resize(static_cast<std::size_t>(resolution));
  grid.scales.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double f = static_cast<double>(i) / (resolution - 1);
    grid.shapes[static_cast<std::size_t>(i)] = shape_lo + f * (shape_hi - shape_lo);
    grid.scales[static_cast<std::size_t>(i)] = scale_lo + f * (scale_hi - scale_lo);
  }
  grid.rel_lik.resize(resolution, resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double ll = weibull_loglik(grid.shapes[static_cast<std::size_t>(i)],
                                       grid.scales[static_cast<std::size_t>(j)],
                                       times, events);
      // A grid point can beat the stored optimum by convergence slack; the
      // true maximum is 1, so clip the rounding excess.
      grid.rel_lik(i, j) = std::min(1.0, std::exp(ll - mle.loglik));
    }
  }
  return grid;
}

}  // namespace hazard
