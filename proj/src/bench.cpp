#include "hazard/bench.hpp"

#include "hazard/coxph.hpp"
#include "hazard/nonparametric.hpp"
#include "hazard/parametric.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hazard {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': not an integer: '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': not a number: '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::runtime_error("config key '" + key + "': expected true/false: '" + value + "'");
}

Encoding parse_encoding(const std::string& value) {
  if (value == "ordinal") return Encoding::kOrdinal;
  if (value == "dummy") return Encoding::kDummy;
  throw std::runtime_error("encoding must be 'ordinal' or 'dummy': '" + value + "'");
}

RankBy parse_rank_by(const std::string& value) {
  if (value == "time") return RankBy::kPredictedTime;
  if (value == "risk") return RankBy::kRiskScore;
  throw std::runtime_error("rank_by must be 'time' or 'risk': '" + value + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// One curve row block per subject: id,time,survival,lower,upper. Models
// without credible bands repeat the point estimate.
struct CurveRows {
  std::ostringstream body;

  void add(int id, double t, double s, double lower, double upper) {
    body << id << ',' << num(t) << ',' << num(s) << ',' << num(lower) << ',' << num(upper)
         << '\n';
  }

  std::string finish() const { return "id,time,survival,lower,upper\n" + body.str(); }
};

}  // namespace

std::vector<std::string> parse_model_list(const std::string& csv) {
  std::vector<std::string> models;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (std::find(kAllModels.begin(), kAllModels.end(), item) == kAllModels.end()) {
      throw std::runtime_error("unknown model '" + item + "'");
    }
    models.push_back(item);
  }
  if (models.empty()) throw std::runtime_error("empty model list");
  return models;
}

BenchConfig parse_config_file(const std::string& path, const BenchConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);

  BenchConfig cfg = base;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("config line " + std::to_string(lineno) + ": unclosed section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "bayes" && section != "rsf" && section != "deepsurv") {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unknown section '" + section + "'");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section.empty() ? key : section + "." + key;

    if (section.empty()) {
      if (key == "data") {
        cfg.data_path = value;
      } else if (key == "models") {
        cfg.models = parse_model_list(value);
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(qualified, value));
      } else if (key == "out") {
        cfg.out_dir = value;
      } else if (key == "encoding") {
        cfg.encoding = parse_encoding(value);
      } else if (key == "standardize_all") {
        cfg.standardize_all = parse_bool(qualified, value);
      } else if (key == "rank_by") {
        cfg.rank_by = parse_rank_by(value);
      } else if (key == "contour_resolution") {
        cfg.contour_resolution = static_cast<int>(parse_int(qualified, value));
      } else if (key == "curve_subjects") {
        cfg.curve_subjects = static_cast<int>(parse_int(qualified, value));
      } else {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unknown key '" + qualified + "'");
      }
    } else if (section == "bayes") {
      if (key == "chains") {
        cfg.bayes.chains = static_cast<int>(parse_int(qualified, value));
      } else if (key == "steps") {
        cfg.bayes.steps = static_cast<int>(parse_int(qualified, value));
      } else if (key == "burn") {
        cfg.bayes.burn = static_cast<int>(parse_int(qualified, value));
      } else if (key == "target_acceptance") {
        cfg.bayes.target_acceptance = parse_double(qualified, value);
      } else {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unknown key '" + qualified + "'");
      }
    } else if (section == "rsf") {
      if (key == "trees") {
        cfg.rsf.n_trees = static_cast<int>(parse_int(qualified, value));
      } else if (key == "mtry") {
        cfg.rsf.mtry = static_cast<int>(parse_int(qualified, value));
      } else if (key == "min_leaf_size") {
        cfg.rsf.min_leaf_size = static_cast<int>(parse_int(qualified, value));
      } else if (key == "min_split_events") {
        cfg.rsf.min_split_events = static_cast<int>(parse_int(qualified, value));
      } else {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unknown key '" + qualified + "'");
      }
    } else {  // deepsurv
      if (key == "hidden") {
        cfg.deepsurv.hidden_size = static_cast<int>(parse_int(qualified, value));
      } else if (key == "learning_rate") {
        cfg.deepsurv.learning_rate = parse_double(qualified, value);
      } else if (key == "epochs") {
        cfg.deepsurv.epochs = static_cast<int>(parse_int(qualified, value));
      } else if (key == "weight_decay") {
        cfg.deepsurv.weight_decay = parse_double(qualified, value);
      } else {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unknown key '" + qualified + "'");
      }
    }
  }
  return cfg;
}

std::string config_canonical(const BenchConfig& config) {
  std::ostringstream out;
  char buf[64];
  auto dbl = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "bayes.burn=" << config.bayes.burn << '\n'
      << "bayes.chains=" << config.bayes.chains << '\n'
      << "bayes.steps=" << config.bayes.steps << '\n'
      << "bayes.target_acceptance=" << dbl(config.bayes.target_acceptance) << '\n'
      << "contour_resolution=" << config.contour_resolution << '\n'
      << "curve_subjects=" << config.curve_subjects << '\n'
      << "data=" << config.data_path << '\n'
      << "deepsurv.epochs=" << config.deepsurv.epochs << '\n'
      << "deepsurv.hidden=" << config.deepsurv.hidden_size << '\n'
      << "deepsurv.learning_rate=" << dbl(config.deepsurv.learning_rate) << '\n'
      << "deepsurv.weight_decay=" << dbl(config.deepsurv.weight_decay) << '\n'
      << "encoding=" << (config.encoding == Encoding::kOrdinal ? "ordinal" : "dummy") << '\n';
  out << "models=";
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    out << (i ? "," : "") << config.models[i];
  }
  out << '\n'
      << "out=" << config.out_dir << '\n'
      << "rank_by=" << (config.rank_by == RankBy::kPredictedTime ? "time" : "risk") << '\n'
      << "rsf.min_leaf_size=" << config.rsf.min_leaf_size << '\n'
      << "rsf.min_split_events=" << config.rsf.min_split_events << '\n'
      << "rsf.mtry=" << config.rsf.mtry << '\n'
      << "rsf.trees=" << config.rsf.n_trees << '\n'
      << "seed=" << config.seed << '\n'
      << "standardize_all=" << (config.standardize_all ? "true" : "false") << '\n';
  return out.str();
}

std::uint64_t config_hash(const BenchConfig& config) {
  const std::string canon = config_canonical(config);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

BenchResult run_benchmark(const BenchConfig& config) {
  using Clock = std::chrono::steady_clock;
  if (config.models.empty()) throw std::runtime_error("empty model list");
  for (const auto& m : config.models) {
    if (std::find(kAllModels.begin(), kAllModels.end(), m) == kAllModels.end()) {
      throw std::runtime_error("unknown model '" + m + "'");
    }
  }

  const SurvivalDataset full = load_csv(config.data_path);
  const auto [train, test] = split_paper(full);
  const Standardization st =
      fit_standardization(config.standardize_all ? full : train, config.encoding);
  const DesignMatrix train_design = build_design(train, st);
  const DesignMatrix test_design = build_design(test, st);
  const double horizon = train_design.times.maxCoeff();

  // Shared evaluation grid: distinct training event times, ascending.
  std::set<double> grid_set;
  for (Eigen::Index i = 0; i < train_design.n(); ++i) {
    if (train_design.events[i]) grid_set.insert(train_design.times[i]);
  }
  const std::vector<double> grid(grid_set.begin(), grid_set.end());

  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  BenchResult result;
  nlohmann::json manifest_models = nlohmann::json::array();
  const int n_test = static_cast<int>(test_design.n());
  const int n_curves = std::min(config.curve_subjects, n_test);

  auto emit_curves = [&](const std::string& model, const CurveRows& rows) {
    const std::string name = "curves_" + model + ".csv";
    write_text(out_dir / name, rows.finish());
    result.files_written.push_back(name);
  };

  std::string table3_csv;

  for (const auto& model : config.models) {
    ModelOutcome outcome;
    outcome.model = model;
    nlohmann::json extra;
    const auto t0 = Clock::now();
    try {
      Eigen::VectorXd predicted(n_test);
      Eigen::VectorXd risk(n_test);
      int rmst_fallbacks = 0;
      CurveRows curves;

      if (model == "weibull") {
        const WeibullFit fit = fit_weibull_mle(train_design.times, train_design.events);
        predicted.setConstant(weibull_median(fit.shape, fit.scale));
        risk.setZero();
        for (int i = 0; i < n_curves; ++i) {
          for (double t : grid) {
            const double s = weibull_survival(fit.shape, fit.scale, t);
            curves.add(test[static_cast<std::size_t>(i)].id, t, s, s, s);
          }
        }
        extra["shape"] = fit.shape;
        extra["scale"] = fit.scale;
      } else if (model == "weibull-aft") {
        const AftFit fit = fit_weibull_aft_mle(train_design);
        for (int i = 0; i < n_test; ++i) {
          const Eigen::VectorXd x = test_design.X.row(i);
          predicted[i] = aft_median_time(fit, x);
          risk[i] = -std::log(aft_lambda(fit, x));
        }
        for (int i = 0; i < n_curves; ++i) {
          const Eigen::VectorXd x = test_design.X.row(i);
          for (double t : grid) {
            const double s = aft_survival(fit, x, t);
            curves.add(test[static_cast<std::size_t>(i)].id, t, s, s, s);
          }
        }
        extra["shape"] = fit.shape;
      } else if (model == "weibull-aft-bayes" || model == "aft-frailty-bayes") {
        BayesFitConfig bayes_config = config.bayes;
        bayes_config.seed = config.seed;
        const BayesModel kind =
            model == "weibull-aft-bayes" ? BayesModel::kAft : BayesModel::kAftFrailty;
        const BayesFit fit = fit_bayes(kind, train_design, bayes_config);
        predicted = posterior_mean_median_times(fit, test_design.X);
        risk = posterior_risk_scores(fit, test_design.X);
        for (int i = 0; i < n_curves; ++i) {
          const Eigen::VectorXd x = test_design.X.row(i);
          const PredictiveCurve pc = posterior_predictive_curve(fit, x, grid);
          for (std::size_t j = 0; j < grid.size(); ++j) {
            curves.add(test[static_cast<std::size_t>(i)].id, grid[j], pc.mean.survival[j],
                       pc.lower[j], pc.upper[j]);
          }
        }
        extra["rhat_max"] = fit.rhat.maxCoeff();
        double acc = 0.0;
        for (double a : fit.chain_acceptance) acc += a;
        extra["acceptance_mean"] = acc / static_cast<double>(fit.chain_acceptance.size());
      } else if (model == "coxph") {
        const CoxFit fit = fit_coxph(train_design);
        const BaselineHazard baseline = breslow_baseline(fit, train_design);
        for (int i = 0; i < n_test; ++i) {
          const Eigen::VectorXd x = test_design.X.row(i);
          const auto curve = cox_survival_curve(fit, baseline, x);
          const auto median = curve_median_time(curve, horizon);
          predicted[i] = median.time;
          rmst_fallbacks += median.rmst_fallback;
          risk[i] = fit.beta.dot(x);
          if (i < n_curves) {
            for (std::size_t j = 0; j < curve.times.size(); ++j) {
              curves.add(test[static_cast<std::size_t>(i)].id, curve.times[j],
                         curve.survival[j], curve.survival[j], curve.survival[j]);
            }
          }
        }
        std::ostringstream t3;
        t3 << "covariate,hazard_ratio,ci_lower,ci_upper\n";
        for (const auto& row : hazard_ratios(fit, st)) {
          t3 << row.covariate << ',' << num(row.hazard_ratio) << ',' << num(row.ci_lower)
             << ',' << num(row.ci_upper) << '\n';
        }
        table3_csv = t3.str();
        extra["loglik_partial"] = fit.loglik_partial;
        extra["iterations"] = fit.iterations;
      } else if (model == "rsf") {
        ForestConfig forest_config = config.rsf;
        forest_config.seed = config.seed;
        const SurvivalForest forest = fit_rsf(train_design, forest_config);
        for (int i = 0; i < n_test; ++i) {
          const Eigen::VectorXd x = test_design.X.row(i);
          const auto curve = rsf_predict_curve(forest, x);
          const auto median = curve_median_time(curve, horizon);
          predicted[i] = median.time;
          rmst_fallbacks += median.rmst_fallback;
          risk[i] = rsf_risk_score(forest, x);
          if (i < n_curves) {
            for (std::size_t j = 0; j < curve.times.size(); ++j) {
              curves.add(test[static_cast<std::size_t>(i)].id, curve.times[j],
                         curve.survival[j], curve.survival[j], curve.survival[j]);
            }
          }
        }
        extra["trees"] = forest_config.n_trees;
      } else {  // deepsurv
        DeepSurvConfig net_config = config.deepsurv;
        net_config.seed = config.seed;
        const DeepSurvFit fit = train_deepsurv(train_design, net_config);
        const BaselineHazard baseline = deepsurv_baseline(fit.net, train_design);
        for (int i = 0; i < n_test; ++i) {
          const Eigen::VectorXd x = test_design.X.row(i);
          const auto curve = deepsurv_survival_curve(fit.net, baseline, x);
          const auto median = curve_median_time(curve, horizon);
          predicted[i] = median.time;
          rmst_fallbacks += median.rmst_fallback;
          risk[i] = forward_risk(fit.net, x);
          if (i < n_curves) {
            for (std::size_t j = 0; j < curve.times.size(); ++j) {
              curves.add(test[static_cast<std::size_t>(i)].id, curve.times[j],
                         curve.survival[j], curve.survival[j], curve.survival[j]);
            }
          }
        }
        extra["initial_loss"] = fit.loss_history.front();
        extra["final_loss"] = fit.final_loss;
      }

      outcome.report = evaluate_model(model, predicted, risk, test_design.times,
                                      test_design.events, config.rank_by);
      outcome.ok = true;
      emit_curves(model, curves);
      extra["rmst_fallbacks"] = rmst_fallbacks;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
      result.any_failed = true;
    }
    outcome.wall_seconds =
        std::chrono::duration<double>(Clock::now() - t0).count();

    nlohmann::json entry;
    entry["name"] = outcome.model;
    entry["ok"] = outcome.ok;
    entry["error"] = outcome.error;
    entry["wall_seconds"] = outcome.wall_seconds;
    if (outcome.ok) {
      entry["c_index"] = outcome.report.c_index;
      entry["rmse"] = outcome.report.rmse;
      entry["n_pairs"] = outcome.report.n_pairs_used;
      entry["n_uncensored"] = outcome.report.n_uncensored_used;
      entry["extra"] = extra;
    }
    manifest_models.push_back(entry);
    result.outcomes.push_back(std::move(outcome));
  }

  // Model metrics summary.
  {
    std::ostringstream t1;
    t1 << "model,c_index,rmse\n";
    for (const auto& o : result.outcomes) {
      if (o.ok) t1 << o.model << ',' << num(o.report.c_index) << ',' << num(o.report.rmse) << '\n';
    }
    write_text(out_dir / "table1.csv", t1.str());
    result.files_written.push_back("table1.csv");
  }

  // Frequentist-vs-Bayesian AFT family comparison.
  {
    std::ostringstream t2;
    t2 << "model,c_index,rmse\n";
    for (const std::string name : {"weibull-aft", "weibull-aft-bayes", "aft-frailty-bayes"}) {
      for (const auto& o : result.outcomes) {
        if (o.model == name && o.ok) {
          t2 << o.model << ',' << num(o.report.c_index) << ',' << num(o.report.rmse) << '\n';
        }
      }
    }
    write_text(out_dir / "table2.csv", t2.str());
    result.files_written.push_back("table2.csv");
  }

  if (!table3_csv.empty()) {
    write_text(out_dir / "table3.csv", table3_csv);
    result.files_written.push_back("table3.csv");
  }

  // Kaplan-Meier vs fitted-line probability-plot data: log(-log S) against
  // log t is linear with slope shape under the fitted distribution.
  {
    const auto km = kaplan_meier(
        std::vector<double>(train_design.times.data(),
                            train_design.times.data() + train_design.n()),
        std::vector<int>(train_design.events.data(),
                         train_design.events.data() + train_design.n()));
    const WeibullFit fit = fit_weibull_mle(train_design.times, train_design.events);
    std::ostringstream pp;
    pp << "time,km_survival,log_time,km_cloglog,fit_cloglog\n";
    for (std::size_t j = 0; j < km.times.size(); ++j) {
      const double s = km.survival[j];
      if (s <= 0.0 || s >= 1.0) continue;
      const double log_t = std::log(km.times[j]);
      pp << num(km.times[j]) << ',' << num(s) << ',' << num(log_t) << ','
         << num(std::log(-std::log(s))) << ','
         << num(fit.shape * (log_t - std::log(fit.scale))) << '\n';
    }
    write_text(out_dir / "probplot.csv", pp.str());
    result.files_written.push_back("probplot.csv");
  }

  // Relative-likelihood grid bracketing the fitted optimum.
  {
    const WeibullFit fit = fit_weibull_mle(train_design.times, train_design.events);
    const ContourGrid grid2 = relative_likelihood_grid(
        train_design.times, train_design.events, 0.75 * fit.shape, 1.25 * fit.shape,
        0.75 * fit.scale, 1.25 * fit.scale, config.contour_resolution);
    std::ostringstream cc;
    cc << "zeta,lambda,rel_lik\n";
    for (std::size_t i = 0; i < grid2.shapes.size(); ++i) {
      for (std::size_t j = 0; j < grid2.scales.size(); ++j) {
        cc << num(grid2.shapes[i]) << ',' << num(grid2.scales[j]) << ','
           << num(grid2.rel_lik(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
           << '\n';
      }
    }
    write_text(out_dir / "contours.csv", cc.str());
    result.files_written.push_back("contours.csv");
  }

  {
    nlohmann::json manifest;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    manifest["config_hash"] = hash_hex;
    manifest["seed"] = config.seed;
    manifest["data"] = config.data_path;
    manifest["encoding"] = config.encoding == Encoding::kOrdinal ? "ordinal" : "dummy";
    manifest["standardize_all"] = config.standardize_all;
    manifest["rank_by"] = config.rank_by == RankBy::kPredictedTime ? "time" : "risk";
    manifest["train_rows"] = static_cast<int>(train.size());
    manifest["test_rows"] = static_cast<int>(test.size());
    manifest["models"] = manifest_models;
    manifest["files"] = result.files_written;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    result.files_written.push_back("manifest.json");
  }

  return result;
}

std::string emit_report(const std::vector<ModelOutcome>& outcomes) {
  if (outcomes.empty()) return "no models run\n";

  std::vector<const ModelOutcome*> ok;
  std::vector<const ModelOutcome*> failed;
  for (const auto& o : outcomes) (o.ok ? ok : failed).push_back(&o);
  std::stable_sort(ok.begin(), ok.end(), [](const ModelOutcome* a, const ModelOutcome* b) {
    return a->report.c_index > b->report.c_index;
  });

  double best_c = 0.0;
  double best_rmse = 0.0;
  if (!ok.empty()) {
    best_c = ok.front()->report.c_index;
    best_rmse = (*std::min_element(ok.begin(), ok.end(),
                                   [](const ModelOutcome* a, const ModelOutcome* b) {
                                     return a->report.rmse < b->report.rmse;
                                   }))
                    ->report.rmse;
  }

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-20s %10s %12s %10s\n", "model", "c_index", "rmse",
                "seconds");
  out << line;
  for (const auto* o : ok) {
    std::snprintf(line, sizeof(line), "%-20s %8.4f%-2s %10.2f%-2s %10.2f\n", o->model.c_str(),
                  o->report.c_index, o->report.c_index == best_c ? " *" : "",
                  o->report.rmse, o->report.rmse == best_rmse ? " *" : "", o->wall_seconds);
    out << line;
  }
  for (const auto* o : failed) {
    out << "failed: " << o->model << ": " << o->error << '\n';
  }
  return out.str();
}

}  // namespace hazard
