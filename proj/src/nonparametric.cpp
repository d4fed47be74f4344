#include "hazard/nonparametric.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hazard {

namespace {

// (distinct time -> {events, censorings}) plus total count, ascending.
struct TimeTable {
  std::vector<double> times;
  std::vector<int> deaths;
  std::vector<int> total;  // subjects with this exact time
};

TimeTable tabulate(const std::vector<double>& times, const std::vector<int>& events) {
  if (times.size() != events.size()) throw std::runtime_error("times/events length mismatch");
  std::map<double, std::pair<int, int>> m;  // time -> {deaths, count}
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto& e = m[times[i]];
    e.first += events[i] ? 1 : 0;
    e.second += 1;
  }
  TimeTable t;
  for (const auto& [tm, dc] : m) {
    t.times.push_back(tm);
    t.deaths.push_back(dc.first);
    t.total.push_back(dc.second);
  }
  return t;
}

}  // namespace

StepSurvivalCurve kaplan_meier(const std::vector<double>& times,
                               const std::vector<int>& events) {
  for (double t : times) {
    if (t <= 0) throw std::runtime_error("non-positive time");
  }
  auto table = tabulate(times, events);
  int at_risk = static_cast<int>(times.size());
  double s = 1.0;
  StepSurvivalCurve curve;
  for (std::size_t j = 0; j < table.times.size(); ++j) {
    if (table.deaths[j] > 0) {
      s *= 1.0 - static_cast<double>(table.deaths[j]) / static_cast<double>(at_risk);
      curve.times.push_back(table.times[j]);
      curve.survival.push_back(s);
      curve.at_risk.push_back(at_risk);
      curve.events_at.push_back(table.deaths[j]);
    }
    at_risk -= table.total[j];
  }
  if (curve.times.empty()) throw std::runtime_error("no event times");
  return curve;
}

GreenwoodResult greenwood_variance(const StepSurvivalCurve& curve) {
  GreenwoodResult out;
  double acc = 0.0;
  bool saturated = false;
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    const double n = curve.at_risk[j];
    const double d = curve.events_at[j];
    if (n > d) {
      acc += d / (n * (n - d));
      saturated = false;
    } else {
      saturated = true;  // carry the left-limit accumulator
    }
    out.variance.push_back(curve.survival[j] * curve.survival[j] * acc);
    out.saturated.push_back(saturated);
  }
  return out;
}

double logrank_statistic(const std::vector<double>& times_a,
                         const std::vector<int>& events_a,
                         const std::vector<double>& times_b,
                         const std::vector<int>& events_b) {
  if (times_a.empty() || times_b.empty()) throw std::runtime_error("empty group");
  auto ta = tabulate(times_a, events_a);
  auto tb = tabulate(times_b, events_b);

  std::vector<double> grid;
  std::merge(ta.times.begin(), ta.times.end(), tb.times.begin(), tb.times.end(),
             std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double n_a = static_cast<double>(times_a.size());
  double n_b = static_cast<double>(times_b.size());
  std::size_t ia = 0, ib = 0;
  double observed_minus_expected = 0.0;
  double variance = 0.0;
  bool any_event = false;

  for (double t : grid) {
    double d_a = 0, c_a = 0, d_b = 0, c_b = 0;
    if (ia < ta.times.size() && ta.times[ia] == t) {
      d_a = ta.deaths[ia];
      c_a = ta.total[ia];
      ++ia;
    }
    if (ib < tb.times.size() && tb.times[ib] == t) {
      d_b = tb.deaths[ib];
      c_b = tb.total[ib];
      ++ib;
    }
    const double d = d_a + d_b;
    const double n = n_a + n_b;
    if (d > 0 && n > 0) {
      any_event = true;
      const double frac_a = n_a / n;
      observed_minus_expected += d_a - d * frac_a;
      if (n > 1) {
        variance += d * frac_a * (1.0 - frac_a) * (n - d) / (n - 1.0);
      }
    }
    n_a -= c_a;
    n_b -= c_b;
  }
  if (!any_event) throw std::runtime_error("no events in either group");
  if (variance <= 0.0) return 0.0;
  return observed_minus_expected * observed_minus_expected / variance;
}

}  // namespace hazard
