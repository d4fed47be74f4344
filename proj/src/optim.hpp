#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>

namespace hazard::detail {

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_inf_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// f returns the objective and fills the gradient.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// BFGS with Armijo backtracking. Minimizes f; stops when the gradient
// infinity-norm drops below grad_tol.
inline OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                                 double grad_tol, int max_iter) {
  const Eigen::Index n = x0.size();
  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(n), g_new(n);
  double fx = f(x, g);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);

  OptimResult out;
  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter;
    out.grad_inf_norm = g.cwiseAbs().maxCoeff();
    if (out.grad_inf_norm < grad_tol) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd dir = -(H * g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {  // not a descent direction, restart the metric
      H.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }

    double step = 1.0;
    Eigen::VectorXd x_new;
    double f_new = fx;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = x + step * dir;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    x = x_new;
    g = g_new;
    fx = f_new;
  }
  if (!out.converged) {
    out.grad_inf_norm = g.cwiseAbs().maxCoeff();
    out.converged = out.grad_inf_norm < grad_tol;
  }
  out.x = x;
  out.value = fx;
  return out;
}

}  // namespace hazard::detail
