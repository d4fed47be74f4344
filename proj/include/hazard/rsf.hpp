#pragma once

#include "hazard/curve.hpp"
#include "hazard/dataset.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace hazard {

struct ForestConfig {
  int n_trees = 500;
  int mtry = 0;              // 0 = ceil(sqrt(p))
  int min_leaf_size = 15;
  int min_split_events = 3;
  std::uint64_t seed = 0;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double statistic = 0.0;
};

struct SurvivalTreeNode {
  // internal
  int feature = -1;
  double threshold = 0.0;
  std::unique_ptr<SurvivalTreeNode> left;
  std::unique_ptr<SurvivalTreeNode> right;
  // leaf
  StepSurvivalCurve curve;
  int sample_count = 0;

  bool is_leaf() const { return feature < 0; }
};

struct SurvivalForest {
  std::vector<std::unique_ptr<SurvivalTreeNode>> trees;
  std::vector<double> train_event_times;  // distinct, ascending
  ForestConfig config;
};

// Exhaustive log-rank maximization over candidate features x midpoints between
// consecutive distinct values; both children must keep min_leaf_size rows.
// Ties break to the lowest feature index, then the lowest threshold.
std::optional<SplitChoice> best_split(const std::vector<int>& rows,
                                      const DesignMatrix& design,
                                      const std::vector<int>& features,
                                      int min_leaf_size);

std::unique_ptr<SurvivalTreeNode> grow_tree(const std::vector<int>& bootstrap_rows,
                                            const DesignMatrix& design,
                                            const ForestConfig& config,
                                            std::uint64_t tree_seed);

// Tree i is seeded from (seed, i); the forest is deterministic given the seed.
SurvivalForest fit_rsf(const DesignMatrix& design, const ForestConfig& config);

// Pointwise mean of per-tree leaf curves on the union of leaf event times.
StepSurvivalCurve rsf_predict_curve(const SurvivalForest& forest, const Eigen::VectorXd& x);

// Ensemble mortality: sum over the training event grid of -log(S clamped at
// 1e-12) of the ensemble curve. Higher = riskier.
double rsf_risk_score(const SurvivalForest& forest, const Eigen::VectorXd& x);

}  // namespace hazard
