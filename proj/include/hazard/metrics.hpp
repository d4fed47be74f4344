#pragma once

#include "hazard/curve.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace hazard {

struct ConcordanceResult {
  double c_index = 0.5;
  std::uint64_t comparable_pairs = 0;
};

// Harrell's C over all pairs: a pair is comparable when the smaller observed
// time belongs to an event; concordant when the longer-lived subject has the
// larger prediction; prediction ties score 0.5. Equal observed times: both
// events exclude the pair; one event counts, with the event subject taken as
// the shorter-lived. Throws when no pair is comparable.
ConcordanceResult concordance_index(const Eigen::VectorXd& predicted,
                                    const Eigen::VectorXd& observed,
                                    const Eigen::VectorXi& events);

// Root mean squared error over uncensored subjects only.
double rmse_uncensored(const Eigen::VectorXd& predicted,
                       const Eigen::VectorXd& observed,
                       const Eigen::VectorXi& events);

// Inverse standard-normal CDF (rational approximation, |error| < 1e-8).
double z_quantile(double p);

struct ConfidenceBand {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> skipped;  // S at 0 or 1: interval undefined, point carried
};

// Complementary log-log interval: S^exp(+z s_cl) .. S^exp(-z s_cl) with
// s_cl = sd / (S |log S|).
ConfidenceBand cloglog_confidence_band(const StepSurvivalCurve& curve,
                                       const std::vector<double>& variances,
                                       double alpha);

enum class RankBy { kPredictedTime, kRiskScore };

struct EvaluationReport {
  std::string model_name;
  double c_index = 0.5;
  double rmse = 0.0;
  std::uint64_t n_pairs_used = 0;
  std::uint64_t n_uncensored_used = 0;
  // per subject: predicted time, risk score, observed time, status
  std::vector<double> predicted_time;
  std::vector<double> risk_score;
  std::vector<double> observed_time;
  std::vector<int> status;
};

EvaluationReport evaluate_model(const std::string& model_name,
                                const Eigen::VectorXd& predicted_times,
                                const Eigen::VectorXd& risk_scores,
                                const Eigen::VectorXd& observed_times,
                                const Eigen::VectorXi& events,
                                RankBy rank_by = RankBy::kPredictedTime);

}  // namespace hazard
