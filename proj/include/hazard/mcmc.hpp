#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hazard {

struct MhConfig {
  int steps = 20000;           // total sweeps, including burn-in
  int burn = 5000;
  double target_acceptance = 0.30;
  std::uint64_t seed = 0;
  double initial_scale = 0.1;
};

struct PosteriorSamples {
  Eigen::MatrixXd draws;                 // kept sweeps x parameters
  std::vector<std::string> param_names;
  double acceptance_rate = 0.0;          // mean over dimensions, post burn-in
  int n_burn = 0;
  std::uint64_t seed = 0;
  int chain_count = 1;
};

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

// Random-walk Metropolis with one accept/reject per coordinate per sweep.
// Proposal scales adapt toward the target acceptance during burn-in only.
// Throws when log_density(init) is not finite.
PosteriorSamples mh_sample(const LogDensity& log_density,
                           const Eigen::VectorXd& init,
                           const MhConfig& config);

// Split-chain potential scale reduction, one value per parameter. Each chain
// is halved, then R-hat = sqrt(((m-1)/m W + B/m) / W) across the half-chains.
Eigen::VectorXd split_rhat(const std::vector<Eigen::MatrixXd>& chains);

}  // namespace hazard
