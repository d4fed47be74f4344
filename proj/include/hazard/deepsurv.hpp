#pragma once

#include "hazard/coxph.hpp"
#include "hazard/dataset.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hazard {

// Single-hidden-layer risk net: f(x) = w2 . relu(W1 x + b1) + b2.
struct RiskNetwork {
  Eigen::MatrixXd W1;  // hidden x p
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;

  Eigen::Index hidden_size() const { return W1.rows(); }
  Eigen::Index input_size() const { return W1.cols(); }
};

struct DeepSurvConfig {
  int hidden_size = 16;
  double learning_rate = 1e-2;
  int epochs = 2000;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
};

double forward_risk(const RiskNetwork& net, const Eigen::VectorXd& x);
Eigen::VectorXd forward_risk_batch(const RiskNetwork& net, const Eigen::MatrixXd& X);

// Negative Cox partial log-likelihood (Breslow ties) of the network risks,
// plus weight_decay * sum of squared parameters.
double cox_nn_loss(const RiskNetwork& net, const DesignMatrix& design, double weight_decay);

// Exact backpropagated gradient, flattened as [W1 row-major, b1, w2, b2].
Eigen::VectorXd loss_gradient(const RiskNetwork& net, const DesignMatrix& design,
                              double weight_decay);

Eigen::VectorXd pack_parameters(const RiskNetwork& net);
RiskNetwork unpack_parameters(const Eigen::VectorXd& flat, int hidden, int p);

struct DeepSurvFit {
  RiskNetwork net;
  std::vector<double> loss_history;  // one entry per epoch, pre-update
  double final_loss = 0.0;
};

// Full-batch gradient descent; initial weights uniform in [-0.1, 0.1] from the
// seeded stream (W1 row-major, then b1, w2, b2).
DeepSurvFit train_deepsurv(const DesignMatrix& design, const DeepSurvConfig& config);

// Breslow baseline driven by network risk scores on the training design.
BaselineHazard deepsurv_baseline(const RiskNetwork& net, const DesignMatrix& train);

double deepsurv_predict_survival(const RiskNetwork& net, const BaselineHazard& baseline,
                                 const Eigen::VectorXd& x, double t);

StepSurvivalCurve deepsurv_survival_curve(const RiskNetwork& net,
                                          const BaselineHazard& baseline,
                                          const Eigen::VectorXd& x);

}  // namespace hazard
