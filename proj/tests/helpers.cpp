#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace testutil {

const GbsgSplit& gbsg() {
  static const GbsgSplit split = [] {
    GbsgSplit g;
    g.full = hazard::load_csv(gbsg_path());
    auto [train, test] = hazard::split_paper(g.full);
    g.train = std::move(train);
    g.test = std::move(test);
    auto st = hazard::fit_standardization(g.train, hazard::Encoding::kOrdinal);
    g.train_design = hazard::build_design(g.train, st);
    g.test_design = hazard::build_design(g.test, st);
    return g;
  }();
  return split;
}

hazard::DesignMatrix make_design(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& times,
                                 const Eigen::VectorXi& events) {
  hazard::DesignMatrix d;
  d.X = X;
  d.times = times;
  d.events = events;
  d.standardization.encoding = hazard::Encoding::kOrdinal;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    d.standardization.column_names.push_back("x" + std::to_string(j + 1));
  }
  d.standardization.mean = Eigen::VectorXd::Zero(X.cols());
  d.standardization.sd = Eigen::VectorXd::Ones(X.cols());
  return d;
}

double naive_weibull_loglik(double zeta, double lambda,
                            const Eigen::VectorXd& times,
                            const Eigen::VectorXi& events) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double hazard = zeta / std::pow(lambda, zeta) * std::pow(t, zeta - 1.0);
    const double cum_haz = std::pow(t / lambda, zeta);
    if (events[i]) ll += std::log(hazard);
    ll -= cum_haz;
  }
  return ll;
}

double naive_aft_loglik(double zeta, const Eigen::VectorXd& beta,
                        const hazard::DesignMatrix& design) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < design.n(); ++i) {
    double lin = beta[0];
    for (Eigen::Index j = 0; j < design.p(); ++j) lin += beta[j + 1] * design.X(i, j);
    const double lambda = std::exp(lin);
    const double t = design.times[i];
    const double hazard = zeta / std::pow(lambda, zeta) * std::pow(t, zeta - 1.0);
    if (design.events[i]) ll += std::log(hazard);
    ll -= std::pow(t / lambda, zeta);
  }
  return ll;
}

double naive_frailty_loglik(double zeta, const Eigen::VectorXd& beta, double theta,
                            const hazard::DesignMatrix& design) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < design.n(); ++i) {
    double lin = beta[0];
    for (Eigen::Index j = 0; j < design.p(); ++j) lin += beta[j + 1] * design.X(i, j);
    const double lambda = std::exp(lin);
    const double t = design.times[i];
    const double cum_haz = std::pow(t / lambda, zeta);
    const double hazard = zeta / std::pow(lambda, zeta) * std::pow(t, zeta - 1.0);
    const double shrink = 1.0 + cum_haz / theta;
    if (design.events[i]) ll += std::log(hazard / shrink);
    ll += std::log(std::pow(shrink, -theta));
  }
  return ll;
}

double naive_cox_partial(const Eigen::VectorXd& beta, const hazard::DesignMatrix& design) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < design.n(); ++i) {
    if (!design.events[i]) continue;
    double denom = 0.0;
    for (Eigen::Index j = 0; j < design.n(); ++j) {
      if (design.times[j] >= design.times[i]) denom += std::exp(beta.dot(design.X.row(j)));
    }
    ll += beta.dot(design.X.row(i)) - std::log(denom);
  }
  return ll;
}

double naive_frailty_survival(double cum_haz, double theta) {
  return std::pow(1.0 + cum_haz / theta, -theta);
}

namespace {

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double eps,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

}  // namespace

double gamma_mixture_survival(double cum_haz, double theta) {
  // Substituting z = exp(y) keeps the integrand smooth near zero for any
  // theta and double-exponentially damped in both tails.
  const double log_norm = theta * std::log(theta) - std::lgamma(theta);
  auto integrand = [&](double y) {
    const double z = std::exp(y);
    return std::exp(log_norm + theta * y - theta * z - cum_haz * z);
  };
  const double lo = -40.0 / theta - 5.0;
  const double hi = std::log(130.0 / theta + 10.0);
  const double fa = integrand(lo);
  const double fb = integrand(hi);
  const double fm = integrand(0.5 * (lo + hi));
  const double whole = simpson(lo, hi, fa, fm, fb);
  return adaptive_simpson(integrand, lo, hi, fa, fm, fb, whole, 1e-13, 48);
}

BruteConcordance brute_concordance(const Eigen::VectorXd& predicted,
                                   const Eigen::VectorXd& observed,
                                   const Eigen::VectorXi& events) {
  // Ordered pairs (i, j): subject i is the one observed to fail first.
  // Equal times: both events, or i censored, drop the pair; an event subject
  // paired with a same-time censored one counts as the earlier failure.
  BruteConcordance out;
  double score = 0.0;
  for (Eigen::Index i = 0; i < observed.size(); ++i) {
    if (!events[i]) continue;
    for (Eigen::Index j = 0; j < observed.size(); ++j) {
      if (j == i) continue;
      if (observed[i] > observed[j]) continue;
      if (observed[i] == observed[j] && events[j]) continue;
      ++out.pairs;
      if (predicted[j] > predicted[i]) score += 1.0;
      else if (predicted[j] == predicted[i]) score += 0.5;
    }
  }
  if (out.pairs == 0) throw std::runtime_error("no comparable pairs in oracle");
  out.c_index = score / static_cast<double>(out.pairs);
  return out;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd hi = x, lo = x;
    hi[k] += step;
    lo[k] -= step;
    grad[k] = (f(hi) - f(lo)) / (2.0 * step);
  }
  return grad;
}

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, double step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hess(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
      pp[a] += step; pp[b] += step;
      pm[a] += step; pm[b] -= step;
      mp[a] -= step; mp[b] += step;
      mm[a] -= step; mm[b] -= step;
      const double v = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step * step);
      hess(a, b) = v;
      hess(b, a) = v;
    }
  }
  return hess;
}

double max_rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < got.size(); ++k) {
    worst = std::max(worst, std::abs(got[k] - want[k]) / std::max(1.0, std::abs(want[k])));
  }
  return worst;
}

SurvSample random_survival(hazard::Rng& rng, int n, double censor_frac,
                           double shape, double scale) {
  SurvSample s;
  s.times.resize(n);
  s.events.resize(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    while (u <= 0.0 || u >= 1.0) u = rng.uniform();
    double t = scale * std::pow(-std::log(1.0 - u), 1.0 / shape);
    int event = 1;
    if (rng.uniform() < censor_frac) {
      t *= 0.05 + 0.9 * rng.uniform();
      event = 0;
    }
    s.times[i] = std::max(t, 1e-6);
    s.events[i] = event;
  }
  return s;
}

hazard::DesignMatrix random_design(hazard::Rng& rng, int n, int p, double censor_frac) {
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  const double shape = 1.2;
  Eigen::VectorXd times(n);
  Eigen::VectorXi events(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lin = 3.0;
    for (Eigen::Index j = 0; j < p; ++j) lin += 0.4 * (j % 2 == 0 ? 1.0 : -1.0) * X(i, j);
    double u = rng.uniform();
    while (u <= 0.0 || u >= 1.0) u = rng.uniform();
    double t = std::exp(lin) * std::pow(-std::log(1.0 - u), 1.0 / shape);
    int event = 1;
    if (rng.uniform() < censor_frac) {
      t *= 0.05 + 0.9 * rng.uniform();
      event = 0;
    }
    times[i] = std::max(t, 1e-6);
    events[i] = event;
  }
  return make_design(X, times, events);
}

}  // namespace testutil
