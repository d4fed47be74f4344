#include "hazard/rsf.hpp"

#include "hazard/nonparametric.hpp"
#include "hazard/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hazard {

namespace {

// Death-time grid of a node: distinct event times with total deaths and total
// at-risk counts. Split search only varies the left-group counts, so the
// log-rank statistic of a candidate partition is one O(T) pass.
struct NodeGrid {
  std::vector<double> times;
  std::vector<double> deaths;
  std::vector<double> at_risk;
};

NodeGrid node_grid(const std::vector<int>& rows, const DesignMatrix& design) {
  NodeGrid grid;
  std::vector<double> death_times;
  for (int r : rows) {
    if (design.events[r]) death_times.push_back(design.times[r]);
  }
  std::sort(death_times.begin(), death_times.end());
  death_times.erase(std::unique(death_times.begin(), death_times.end()), death_times.end());
  grid.times = death_times;
  grid.deaths.assign(grid.times.size(), 0.0);
  grid.at_risk.assign(grid.times.size(), 0.0);
  for (int r : rows) {
    const double t = design.times[r];
    const auto last = std::upper_bound(grid.times.begin(), grid.times.end(), t);
    for (auto it = grid.times.begin(); it != last; ++it) {
      grid.at_risk[static_cast<std::size_t>(it - grid.times.begin())] += 1.0;
    }
    if (design.events[r]) {
      const auto pos = std::lower_bound(grid.times.begin(), grid.times.end(), t);
      grid.deaths[static_cast<std::size_t>(pos - grid.times.begin())] += 1.0;
    }
  }
  return grid;
}

// Left-group membership counts, updated incrementally as rows move left.
struct LeftCounts {
  std::vector<double> risk_diff;  // difference array; prefix sum = left at-risk
  std::vector<double> deaths;

  explicit LeftCounts(std::size_t grid_size)
      : risk_diff(grid_size + 1, 0.0), deaths(grid_size, 0.0) {}

  void add_row(int row, const DesignMatrix& design, const NodeGrid& grid) {
    const double t = design.times[row];
    const auto last = std::upper_bound(grid.times.begin(), grid.times.end(), t);
    const std::size_t k = static_cast<std::size_t>(last - grid.times.begin());
    risk_diff[0] += 1.0;
    risk_diff[k] -= 1.0;
    if (design.events[row]) {
      const auto pos = std::lower_bound(grid.times.begin(), grid.times.end(), t);
      deaths[static_cast<std::size_t>(pos - grid.times.begin())] += 1.0;
    }
  }
};

double logrank_from_counts(const NodeGrid& grid, const LeftCounts& left) {
  double numer = 0.0;
  double var = 0.0;
  double risk_left = 0.0;
  for (std::size_t j = 0; j < grid.times.size(); ++j) {
    risk_left += left.risk_diff[j];
    const double n = grid.at_risk[j];
    const double d = grid.deaths[j];
    if (n <= 1.0) continue;
    const double frac = risk_left / n;
    numer += left.deaths[j] - d * frac;
    var += d * frac * (1.0 - frac) * (n - d) / (n - 1.0);
  }
  if (var <= 0.0) return 0.0;
  return numer * numer / var;
}

StepSurvivalCurve leaf_curve(const std::vector<int>& rows, const DesignMatrix& design) {
  std::vector<double> times;
  std::vector<int> events;
  int n_events = 0;
  for (int r : rows) {
    times.push_back(design.times[r]);
    events.push_back(design.events[r]);
    n_events += design.events[r];
  }
  if (n_events == 0) return StepSurvivalCurve{};  // all censored: flat at 1
  return kaplan_meier(times, events);
}

std::unique_ptr<SurvivalTreeNode> make_leaf(const std::vector<int>& rows,
                                            const DesignMatrix& design) {
  auto node = std::make_unique<SurvivalTreeNode>();
  node->curve = leaf_curve(rows, design);
  node->sample_count = static_cast<int>(rows.size());
  return node;
}

std::vector<int> sample_features(Eigen::Index p, int mtry, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(p));
  std::iota(pool.begin(), pool.end(), 0);
  for (int k = 0; k < mtry; ++k) {
    const std::size_t j =
        static_cast<std::size_t>(k) + rng.below(pool.size() - static_cast<std::size_t>(k));
    std::swap(pool[static_cast<std::size_t>(k)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(mtry));
  std::sort(pool.begin(), pool.end());  // evaluation order fixes tie-breaking
  return pool;
}

std::unique_ptr<SurvivalTreeNode> grow_node(const std::vector<int>& rows,
                                            const DesignMatrix& design,
                                            const ForestConfig& config, Rng& rng) {
  int n_events = 0;
  for (int r : rows) n_events += design.events[r];
  if (static_cast<int>(rows.size()) < 2 * config.min_leaf_size ||
      n_events < config.min_split_events) {
    return make_leaf(rows, design);
  }

  const int mtry = config.mtry > 0
                       ? std::min<int>(config.mtry, static_cast<int>(design.p()))
                       : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(design.p()))));
  const auto features = sample_features(design.p(), mtry, rng);
  const auto split = best_split(rows, design, features, config.min_leaf_size);
  if (!split) return make_leaf(rows, design);

  std::vector<int> left_rows;
  std::vector<int> right_rows;
  for (int r : rows) {
    (design.X(r, split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);
  }

  auto node = std::make_unique<SurvivalTreeNode>();
  node->feature = split->feature;
  node->threshold = split->threshold;
  node->sample_count = static_cast<int>(rows.size());
  node->left = grow_node(left_rows, design, config, rng);
  node->right = grow_node(right_rows, design, config, rng);
  return node;
}

const SurvivalTreeNode* descend(const SurvivalTreeNode* node, const Eigen::VectorXd& x) {
  while (!node->is_leaf()) {
    node = x[node->feature] <= node->threshold ? node->left.get() : node->right.get();
  }
  return node;
}

}  // namespace

std::optional<SplitChoice> best_split(const std::vector<int>& rows,
                                      const DesignMatrix& design,
                                      const std::vector<int>& features,
                                      int min_leaf_size) {
  const auto grid = node_grid(rows, design);
  if (grid.times.empty()) return std::nullopt;

  std::optional<SplitChoice> best;
  std::vector<int> order(rows);
  for (int f : features) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return design.X(a, f) < design.X(b, f);
    });
    LeftCounts left(grid.times.size());
    std::size_t i = 0;
    while (i < order.size()) {
      // Move one block of equal feature values to the left side.
      const double value = design.X(order[i], f);
      std::size_t j = i;
      while (j < order.size() && design.X(order[j], f) == value) {
        left.add_row(order[j], design, grid);
        ++j;
      }
      if (j == order.size()) break;  // no distinct value remains on the right
      const std::size_t left_count = j;
      const std::size_t right_count = order.size() - j;
      if (left_count >= static_cast<std::size_t>(min_leaf_size) &&
          right_count >= static_cast<std::size_t>(min_leaf_size)) {
        const double statistic = logrank_from_counts(grid, left);
        if (!best || statistic > best->statistic) {
          best = SplitChoice{f, 0.5 * (value + design.X(order[j], f)), statistic};
        }
      }
      i = j;
    }
  }
  return best;
}

std::unique_ptr<SurvivalTreeNode> grow_tree(const std::vector<int>& bootstrap_rows,
                                            const DesignMatrix& design,
                                            const ForestConfig& config,
                                            std::uint64_t tree_seed) {
  // Stream 1: feature sampling. Stream 0 is reserved for the bootstrap draw.
  Rng rng = Rng::derive(tree_seed, 1);
  return grow_node(bootstrap_rows, design, config, rng);
}

SurvivalForest fit_rsf(const DesignMatrix& design, const ForestConfig& config) {
  if (config.n_trees < 1) throw std::runtime_error("n_trees must be >= 1");
  if (config.min_leaf_size < 1) throw std::runtime_error("min_leaf_size must be >= 1");
  if (config.mtry < 0 || config.mtry > design.p()) {
    throw std::runtime_error("mtry must be in [1, p]");
  }

  SurvivalForest forest;
  forest.config = config;
  const std::size_t n = static_cast<std::size_t>(design.n());
  for (int i = 0; i < config.n_trees; ++i) {
    const std::uint64_t tree_seed = Rng::mix(config.seed, static_cast<std::uint64_t>(i));
    Rng boot = Rng::derive(tree_seed, 0);
    std::vector<int> rows(n);
    for (std::size_t k = 0; k < n; ++k) rows[k] = static_cast<int>(boot.below(n));
    forest.trees.push_back(grow_tree(rows, design, config, tree_seed));
  }

  std::set<double> event_times;
  for (Eigen::Index i = 0; i < design.n(); ++i) {
    if (design.events[i]) event_times.insert(design.times[i]);
  }
  forest.train_event_times.assign(event_times.begin(), event_times.end());
  return forest;
}

StepSurvivalCurve rsf_predict_curve(const SurvivalForest& forest, const Eigen::VectorXd& x) {
  std::vector<const StepSurvivalCurve*> leaves;
  std::set<double> grid;
  for (const auto& tree : forest.trees) {
    const auto* leaf = descend(tree.get(), x);
    leaves.push_back(&leaf->curve);
    grid.insert(leaf->curve.times.begin(), leaf->curve.times.end());
  }

  StepSurvivalCurve out;
  out.times.assign(grid.begin(), grid.end());
  out.survival.reserve(out.times.size());
  for (double t : out.times) {
    double total = 0.0;
    for (const auto* leaf : leaves) total += leaf->survival_at(t);
    out.survival.push_back(total / static_cast<double>(leaves.size()));
  }
  out.at_risk.assign(out.times.size(), 0);
  out.events_at.assign(out.times.size(), 0);
  return out;
}

double rsf_risk_score(const SurvivalForest& forest, const Eigen::VectorXd& x) {
  const auto curve = rsf_predict_curve(forest, x);
  double score = 0.0;
  for (double t : forest.train_event_times) {
    const double s = std::max(curve.survival_at(t), 1e-12);
    score += -std::log(s);
  }
  return score;
}

}  // namespace hazard
