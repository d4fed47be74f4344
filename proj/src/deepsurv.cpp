#include "hazard/deepsurv.hpp"

#include "hazard/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hazard {

namespace {

Eigen::VectorXd hidden_activation(const RiskNetwork& net, const Eigen::VectorXd& x) {
  return (net.W1 * x + net.b1).cwiseMax(0.0);
}

// d(-loglik)/d(risk_i) for the Breslow-tied partial likelihood; the risk-set
// ratio sum is a suffix accumulation over descending-time tie groups.
Eigen::VectorXd risk_gradient(const Eigen::VectorXd& log_risks, const DesignMatrix& design) {
  const Eigen::Index n = design.n();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return design.times[a] > design.times[b];
  });

  std::vector<std::pair<int, int>> groups;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && design.times[order[static_cast<std::size_t>(j)]] ==
                        design.times[order[static_cast<std::size_t>(i)]]) {
      ++j;
    }
    groups.emplace_back(i, j);
    i = j;
  }

  // Forward pass over descending time: S0 prefix sums and per-group d_g/S0_g.
  std::vector<double> ratio(groups.size(), 0.0);
  double s0 = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    int deaths = 0;
    for (int k = groups[g].first; k < groups[g].second; ++k) {
      const int row = order[static_cast<std::size_t>(k)];
      s0 += std::exp(log_risks[row]);
      deaths += design.events[row];
    }
    ratio[g] = deaths / s0;
  }

  // Reverse pass: subject i with time t_i accumulates ratios of every group
  // whose event time is <= t_i.
  Eigen::VectorXd grad(n);
  double ratio_sum = 0.0;
  for (std::size_t g = groups.size(); g-- > 0;) {
    ratio_sum += ratio[g];
    for (int k = groups[g].first; k < groups[g].second; ++k) {
      const int row = order[static_cast<std::size_t>(k)];
      const double dloglik = design.events[row] - std::exp(log_risks[row]) * ratio_sum;
      grad[row] = -dloglik;
    }
  }
  return grad;
}

}  // namespace

double forward_risk(const RiskNetwork& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_size()) throw std::runtime_error("input length mismatch");
  return net.w2.dot(hidden_activation(net, x)) + net.b2;
}

Eigen::VectorXd forward_risk_batch(const RiskNetwork& net, const Eigen::MatrixXd& X) {
  if (X.cols() != net.input_size()) throw std::runtime_error("input length mismatch");
  Eigen::MatrixXd Z = (X * net.W1.transpose()).rowwise() + net.b1.transpose();
  return (Z.cwiseMax(0.0) * net.w2).array() + net.b2;
}

double cox_nn_loss(const RiskNetwork& net, const DesignMatrix& design, double weight_decay) {
  const Eigen::VectorXd risks = forward_risk_batch(net, design.X);
  const double penalty = pack_parameters(net).squaredNorm();
  return -cox_partial_loglik_risks(risks, design) + weight_decay * penalty;
}

Eigen::VectorXd loss_gradient(const RiskNetwork& net, const DesignMatrix& design,
                              double weight_decay) {
  const Eigen::MatrixXd Z =
      ((design.X * net.W1.transpose()).rowwise() + net.b1.transpose()).eval();
  const Eigen::MatrixXd A = Z.cwiseMax(0.0);
  const Eigen::VectorXd risks = (A * net.w2).array() + net.b2;
  const Eigen::VectorXd drisk = risk_gradient(risks, design);

  // back(i,k) = drisk_i * w2_k * 1[z_ik > 0]
  const Eigen::MatrixXd back = (Z.array() > 0.0)
                                   .cast<double>()
                                   .cwiseProduct((drisk * net.w2.transpose()).array())
                                   .matrix();

  RiskNetwork grads;
  grads.W1 = back.transpose() * design.X;
  grads.b1 = back.colwise().sum();
  grads.w2 = A.transpose() * drisk;
  grads.b2 = drisk.sum();
  return pack_parameters(grads) + 2.0 * weight_decay * pack_parameters(net);
}

Eigen::VectorXd pack_parameters(const RiskNetwork& net) {
  const Eigen::Index hidden = net.hidden_size();
  const Eigen::Index p = net.input_size();
  Eigen::VectorXd flat(hidden * p + hidden + hidden + 1);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < hidden; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) flat[k++] = net.W1(r, c);
  }
  flat.segment(k, hidden) = net.b1;
  k += hidden;
  flat.segment(k, hidden) = net.w2;
  k += hidden;
  flat[k] = net.b2;
  return flat;
}

RiskNetwork unpack_parameters(const Eigen::VectorXd& flat, int hidden, int p) {
  if (flat.size() != static_cast<Eigen::Index>(hidden) * p + 2 * hidden + 1) {
    throw std::runtime_error("parameter length mismatch");
  }
  RiskNetwork net;
  net.W1.resize(hidden, p);
  Eigen::Index k = 0;
  for (int r = 0; r < hidden; ++r) {
    for (int c = 0; c < p; ++c) net.W1(r, c) = flat[k++];
  }
  net.b1 = flat.segment(k, hidden);
  k += hidden;
  net.w2 = flat.segment(k, hidden);
  k += hidden;
  net.b2 = flat[k];
  return net;
}

DeepSurvFit train_deepsurv(const DesignMatrix& design, const DeepSurvConfig& config) {
  if (config.hidden_size < 1) throw std::runtime_error("hidden_size must be >= 1");
  if (config.learning_rate < 0.0) throw std::runtime_error("learning_rate must be >= 0");
  if (config.epochs < 1) throw std::runtime_error("epochs must be >= 1");

  const int p = static_cast<int>(design.p());
  const Eigen::Index n_params =
      static_cast<Eigen::Index>(config.hidden_size) * p + 2 * config.hidden_size + 1;
  Rng rng(config.seed);
  Eigen::VectorXd flat(n_params);
  for (Eigen::Index k = 0; k < n_params; ++k) flat[k] = rng.uniform(-0.1, 0.1);

  DeepSurvFit fit;
  fit.net = unpack_parameters(flat, config.hidden_size, p);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = cox_nn_loss(fit.net, design, config.weight_decay);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch));
    }
    fit.loss_history.push_back(loss);
    const Eigen::VectorXd grad = loss_gradient(fit.net, design, config.weight_decay);
    flat -= config.learning_rate * grad;
    fit.net = unpack_parameters(flat, config.hidden_size, p);
  }
  fit.final_loss = cox_nn_loss(fit.net, design, config.weight_decay);
  if (!std::isfinite(fit.final_loss)) {
    throw std::runtime_error("non-finite loss at epoch " + std::to_string(config.epochs));
  }
  return fit;
}

BaselineHazard deepsurv_baseline(const RiskNetwork& net, const DesignMatrix& train) {
  return breslow_baseline_from_risks(forward_risk_batch(net, train.X), train);
}

double deepsurv_predict_survival(const RiskNetwork& net, const BaselineHazard& baseline,
                                 const Eigen::VectorXd& x, double t) {
  auto it = std::upper_bound(baseline.event_times.begin(), baseline.event_times.end(), t);
  if (it == baseline.event_times.begin()) return 1.0;
  const double h0 =
      baseline.cumulative[static_cast<std::size_t>(it - baseline.event_times.begin()) - 1];
  return std::exp(-h0 * std::exp(forward_risk(net, x)));
}

StepSurvivalCurve deepsurv_survival_curve(const RiskNetwork& net,
                                          const BaselineHazard& baseline,
                                          const Eigen::VectorXd& x) {
  const double risk = std::exp(forward_risk(net, x));
  StepSurvivalCurve curve;
  curve.times = baseline.event_times;
  for (double h0 : baseline.cumulative) curve.survival.push_back(std::exp(-h0 * risk));
  curve.at_risk.assign(curve.times.size(), 0);
  curve.events_at.assign(curve.times.size(), 0);
  return curve;
}

}  // namespace hazard
