#pragma once

#include <vector>

namespace hazard {

// Right-continuous step function: S(t) = survival[j] for the largest
// times[j] <= t, and 1 before the first step.
struct StepSurvivalCurve {
  std::vector<double> times;     // strictly increasing
  std::vector<double> survival;  // non-increasing, in [0,1]
  std::vector<int> at_risk;
  std::vector<int> events_at;

  double survival_at(double t) const;
};

struct MedianEstimate {
  double time = 0.0;
  bool rmst_fallback = false;  // curve never crossed 0.5
};

// Smallest grid time with S <= 0.5; when the curve never crosses 0.5, the
// restricted mean survival time over [0, horizon] is returned with a flag.
MedianEstimate curve_median_time(const StepSurvivalCurve& curve, double horizon);

// Area under the step curve over [0, horizon].
double restricted_mean_survival(const StepSurvivalCurve& curve, double horizon);

}  // namespace hazard
