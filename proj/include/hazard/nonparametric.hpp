#pragma once

#include "hazard/curve.hpp"

#include <vector>

namespace hazard {

// Product-limit estimate over distinct event times. Censored-only times do not
// create steps but still shrink later risk sets. Throws when no event exists.
StepSurvivalCurve kaplan_meier(const std::vector<double>& times,
                               const std::vector<int>& events);

struct GreenwoodResult {
  std::vector<double> variance;   // Var[S(t_j)] aligned to curve.times
  std::vector<bool> saturated;    // n_j == d_j: left-limit value carried
};

// Greenwood's formula S(t)^2 * sum d_j / (n_j (n_j - d_j)).
GreenwoodResult greenwood_variance(const StepSurvivalCurve& curve);

// Two-group log-rank chi-square: (sum(O_A - E_A))^2 / sum V with the
// hypergeometric variance; risk sets of size 1 contribute zero variance.
double logrank_statistic(const std::vector<double>& times_a,
                         const std::vector<int>& events_a,
                         const std::vector<double>& times_b,
                         const std::vector<int>& events_b);

}  // namespace hazard
