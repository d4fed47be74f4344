#include "hazard/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace hazard {

ConcordanceResult concordance_index(const Eigen::VectorXd& predicted,
                                    const Eigen::VectorXd& observed,
                                    const Eigen::VectorXi& events) {
  const Eigen::Index n = observed.size();
  if (predicted.size() != n || events.size() != n) {
    throw std::runtime_error("metric input length mismatch");
  }

  double concordant = 0.0;
  std::uint64_t comparable = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Eigen::Index shorter;
      Eigen::Index longer;
      if (observed[i] == observed[j]) {
        if (events[i] + events[j] != 1) continue;  // both events or both censored
        shorter = events[i] ? i : j;               // the death precedes the censoring
        longer = events[i] ? j : i;
      } else {
        shorter = observed[i] < observed[j] ? i : j;
        longer = observed[i] < observed[j] ? j : i;
        if (!events[shorter]) continue;
      }
      ++comparable;
      if (predicted[shorter] < predicted[longer]) {
        concordant += 1.0;
      } else if (predicted[shorter] == predicted[longer]) {
        concordant += 0.5;
      }
    }
  }
  if (comparable == 0) throw std::runtime_error("no comparable pairs");
  return ConcordanceResult{concordant / static_cast<double>(comparable), comparable};
}

double rmse_uncensored(const Eigen::VectorXd& predicted,
                       const Eigen::VectorXd& observed,
                       const Eigen::VectorXi& events) {
  const Eigen::Index n = observed.size();
  if (predicted.size() != n || events.size() != n) {
    throw std::runtime_error("metric input length mismatch");
  }
  double sum_sq = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!events[i]) continue;
    const double d = predicted[i] - observed[i];
    sum_sq += d * d;
    ++count;
  }
  if (count == 0) throw std::runtime_error("no uncensored subjects");
  return std::sqrt(sum_sq / count);
}

double z_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::runtime_error("quantile probability outside (0,1)");

  // Rational approximation (central + tail regimes), then one Halley step
  // against erfc to polish.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

ConfidenceBand cloglog_confidence_band(const StepSurvivalCurve& curve,
                                       const std::vector<double>& variances,
                                       double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::runtime_error("alpha outside (0,1)");
  if (variances.size() != curve.times.size()) {
    throw std::runtime_error("variance vector length mismatch");
  }
  const double z = z_quantile(1.0 - alpha / 2.0);

  ConfidenceBand band;
  band.lower.resize(curve.times.size());
  band.upper.resize(curve.times.size());
  band.skipped.resize(curve.times.size());
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    const double s = curve.survival[j];
    if (s <= 0.0 || s >= 1.0) {
      band.lower[j] = s;
      band.upper[j] = s;
      band.skipped[j] = true;
      continue;
    }
    const double s_cl = std::sqrt(variances[j]) / (s * std::abs(std::log(s)));
    band.lower[j] = std::pow(s, std::exp(z * s_cl));
    band.upper[j] = std::pow(s, std::exp(-z * s_cl));
    band.skipped[j] = false;
  }
  return band;
}

EvaluationReport evaluate_model(const std::string& model_name,
                                const Eigen::VectorXd& predicted_times,
                                const Eigen::VectorXd& risk_scores,
                                const Eigen::VectorXd& observed_times,
                                const Eigen::VectorXi& events,
                                RankBy rank_by) {
  // Higher risk means shorter predicted survival, so ranking by risk feeds the
  // concordance formula through a sign flip.
  const Eigen::VectorXd ranking =
      rank_by == RankBy::kPredictedTime ? predicted_times : (-risk_scores).eval();
  const auto conc = concordance_index(ranking, observed_times, events);

  EvaluationReport report;
  report.model_name = model_name;
  report.c_index = conc.c_index;
  report.n_pairs_used = conc.comparable_pairs;
  report.rmse = rmse_uncensored(predicted_times, observed_times, events);
  report.n_uncensored_used = static_cast<std::uint64_t>(events.cast<std::int64_t>().sum());
  report.predicted_time.assign(predicted_times.data(), predicted_times.data() + predicted_times.size());
  report.risk_score.assign(risk_scores.data(), risk_scores.data() + risk_scores.size());
  report.observed_time.assign(observed_times.data(), observed_times.data() + observed_times.size());
  report.status.assign(events.data(), events.data() + events.size());
  return report;
}

}  // namespace hazard
