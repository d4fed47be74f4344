#include "hazard/curve.hpp"

#include <algorithm>

namespace hazard {

double StepSurvivalCurve::survival_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(it - times.begin()) - 1];
}

double restricted_mean_survival(const StepSurvivalCurve& curve, double horizon) {
  double area = 0.0;
  double prev_t = 0.0;
  double prev_s = 1.0;
  for (std::size_t j = 0; j < curve.times.size() && curve.times[j] <= horizon; ++j) {
    area += prev_s * (curve.times[j] - prev_t);
    prev_t = curve.times[j];
    prev_s = curve.survival[j];
  }
  if (horizon > prev_t) area += prev_s * (horizon - prev_t);
  return area;
}

MedianEstimate curve_median_time(const StepSurvivalCurve& curve, double horizon) {
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    if (curve.survival[j] <= 0.5) return {curve.times[j], false};
  }
  return {restricted_mean_survival(curve, horizon), true};
}

}  // namespace hazard
