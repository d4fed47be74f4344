#include "hazard/mcmc.hpp"

#include "hazard/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace hazard {

PosteriorSamples mh_sample(const LogDensity& log_density,
                           const Eigen::VectorXd& init,
                           const MhConfig& config) {
  if (config.steps <= config.burn || config.burn < 0) {
    throw std::runtime_error("steps must exceed burn-in");
  }
  if (config.initial_scale <= 0.0) throw std::runtime_error("zero proposal scale");
  const Eigen::Index dim = init.size();

  double lp = log_density(init);
  if (!std::isfinite(lp)) throw std::runtime_error("log density not finite at init");

  Rng rng(config.seed);
  Eigen::VectorXd x = init;
  Eigen::VectorXd scale = Eigen::VectorXd::Constant(dim, config.initial_scale);

  const int kept = config.steps - config.burn;
  PosteriorSamples out;
  out.draws.resize(kept, dim);
  out.n_burn = config.burn;
  out.seed = config.seed;

  // Scales adapt every 50 burn-in sweeps from per-dimension acceptance counts.
  Eigen::VectorXd window_accepts = Eigen::VectorXd::Zero(dim);
  int window_size = 0;
  Eigen::VectorXd post_accepts = Eigen::VectorXd::Zero(dim);
  long post_sweeps = 0;

  for (int sweep = 0; sweep < config.steps; ++sweep) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double old = x[k];
      x[k] = old + scale[k] * rng.normal();
      const double lp_new = log_density(x);
      const bool accept = std::isfinite(lp_new) && std::log(rng.uniform() + 1e-300) < lp_new - lp;
      if (accept) {
        lp = lp_new;
        if (sweep < config.burn) window_accepts[k] += 1.0;
        else post_accepts[k] += 1.0;
      } else {
        x[k] = old;
      }
    }
    if (sweep < config.burn) {
      if (++window_size == 50) {
        for (Eigen::Index k = 0; k < dim; ++k) {
          const double rate = window_accepts[k] / 50.0;
          scale[k] *= std::exp(0.5 * (rate - config.target_acceptance));
        }
        window_accepts.setZero();
        window_size = 0;
      }
    } else {
      ++post_sweeps;
      out.draws.row(sweep - config.burn) = x;
    }
  }
  out.acceptance_rate = post_accepts.sum() / (static_cast<double>(post_sweeps) * dim);
  return out;
}

Eigen::VectorXd split_rhat(const std::vector<Eigen::MatrixXd>& chains) {
  if (chains.empty()) throw std::runtime_error("no chains");
  const Eigen::Index dim = chains[0].cols();
  const Eigen::Index m = chains[0].rows() / 2;
  if (m < 2) throw std::runtime_error("chains too short for split R-hat");

  std::vector<Eigen::MatrixXd> halves;
  for (const auto& c : chains) {
    halves.push_back(c.topRows(m));
    halves.push_back(c.middleRows(m, m));
  }
  const auto n_half = static_cast<double>(halves.size());

  Eigen::VectorXd rhat(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    double grand = 0.0;
    std::vector<double> means, vars;
    for (const auto& h : halves) {
      const double mean = h.col(k).mean();
      const double var = (h.col(k).array() - mean).square().sum() / (m - 1);
      means.push_back(mean);
      vars.push_back(var);
      grand += mean;
    }
    grand /= n_half;
    double within = 0.0, between = 0.0;
    for (std::size_t c = 0; c < halves.size(); ++c) {
      within += vars[c];
      between += (means[c] - grand) * (means[c] - grand);
    }
    within /= n_half;
    between *= static_cast<double>(m) / (n_half - 1.0);
    const double pooled =
        (static_cast<double>(m - 1) / m) * within + between / static_cast<double>(m);
    rhat[k] = std::sqrt(pooled / within);
  }
  return rhat;
}

}  // namespace hazard
