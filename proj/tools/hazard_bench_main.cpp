#include "hazard/bench.hpp"
#include "hazard/coxph.hpp"
#include "hazard/nonparametric.hpp"
#include "hazard/parametric.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using hazard::BenchConfig;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Shared flags; a flag only overrides the config file when it was given.
struct CommonFlags {
  std::string config_path;
  std::string data_path;
  std::string out_dir;
  std::string models_csv;
  std::string encoding;
  std::string rank_by;
  std::uint64_t seed = 0;
  bool standardize_all = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file with [model] sections");
    cmd->add_option("--data", data_path, "dataset CSV path");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--models", models_csv, "comma-separated model list");
    cmd->add_option("--encoding", encoding, "covariate encoding")
        ->check(CLI::IsMember({"ordinal", "dummy"}));
    cmd->add_option("--rank-by", rank_by, "concordance ranking variable")
        ->check(CLI::IsMember({"time", "risk"}));
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_flag("--standardize-all", standardize_all,
                  "fit standardization on all rows instead of the training rows");
  }

  BenchConfig resolve(const CLI::App* cmd) const {
    BenchConfig cfg;
    if (cmd->count("--config")) cfg = hazard::parse_config_file(config_path, cfg);
    if (cmd->count("--data")) cfg.data_path = data_path;
    if (cmd->count("--out")) cfg.out_dir = out_dir;
    if (cmd->count("--models")) cfg.models = hazard::parse_model_list(models_csv);
    if (cmd->count("--encoding")) {
      cfg.encoding = encoding == "dummy" ? hazard::Encoding::kDummy : hazard::Encoding::kOrdinal;
    }
    if (cmd->count("--rank-by")) {
      cfg.rank_by =
          rank_by == "risk" ? hazard::RankBy::kRiskScore : hazard::RankBy::kPredictedTime;
    }
    if (cmd->count("--seed")) cfg.seed = seed;
    if (cmd->count("--standardize-all")) cfg.standardize_all = true;
    return cfg;
  }
};

struct ModelFlags {
  int trees = 0;
  int chains = 0;
  int steps = 0;
  int burn = 0;
  int hidden = 0;
  int epochs = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "forest size");
    cmd->add_option("--chains", chains, "sampler chains");
    cmd->add_option("--steps", steps, "sampler sweeps per chain, burn-in included");
    cmd->add_option("--burn", burn, "burn-in sweeps");
    cmd->add_option("--hidden", hidden, "network hidden units");
    cmd->add_option("--epochs", epochs, "training epochs");
  }

  void apply(const CLI::App* cmd, BenchConfig& cfg) const {
    if (cmd->count("--trees")) cfg.rsf.n_trees = trees;
    if (cmd->count("--chains")) cfg.bayes.chains = chains;
    if (cmd->count("--steps")) cfg.bayes.steps = steps;
    if (cmd->count("--burn")) cfg.bayes.burn = burn;
    if (cmd->count("--hidden")) cfg.deepsurv.hidden_size = hidden;
    if (cmd->count("--epochs")) cfg.deepsurv.epochs = epochs;
  }
};

// Model-name aliases accepted on the command line.
std::string canonical_model(std::string name) {
  if (name == "aft-frailty") return "aft-frailty-bayes";
  if (name == "aft-bayes") return "weibull-aft-bayes";
  if (name == "aft") return "weibull-aft";
  return name;
}

int run_data_validate(const std::string& path) {
  const auto ds = hazard::load_csv(path);
  std::cout << "rows=" << ds.size() << " events=" << ds.event_count()
            << " censored=" << ds.size() - ds.event_count() << '\n';
  return 0;
}

int run_bench(const BenchConfig& cfg) {
  const auto result = hazard::run_benchmark(cfg);
  std::cout << hazard::emit_report(result.outcomes);
  std::cout << "outputs in " << cfg.out_dir << '\n';
  return result.any_failed ? 2 : 0;
}

int run_contours(const BenchConfig& cfg, int resolution) {
  const auto full = hazard::load_csv(cfg.data_path);
  const auto [train, test] = hazard::split_paper(full);
  const Eigen::VectorXd times = train.times();
  const Eigen::VectorXi events = train.events();
  const auto fit = hazard::fit_weibull_mle(times, events);
  const auto grid =
      hazard::relative_likelihood_grid(times, events, 0.75 * fit.shape, 1.25 * fit.shape,
                                       0.75 * fit.scale, 1.25 * fit.scale, resolution);
  std::ostringstream cc;
  cc << "zeta,lambda,rel_lik\n";
  for (std::size_t i = 0; i < grid.shapes.size(); ++i) {
    for (std::size_t j = 0; j < grid.scales.size(); ++j) {
      cc << num(grid.shapes[i]) << ',' << num(grid.scales[j]) << ','
         << num(grid.rel_lik(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
         << '\n';
    }
  }
  const auto path = std::filesystem::path(cfg.out_dir) / "contours.csv";
  write_text(path, cc.str());
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int run_curves(const BenchConfig& cfg, const std::string& split, double alpha) {
  const auto full = hazard::load_csv(cfg.data_path);
  const hazard::SurvivalDataset* rows = &full;
  auto parts = hazard::split_paper(full);
  if (split == "train") rows = &parts.first;
  if (split == "test") rows = &parts.second;

  std::vector<double> times;
  std::vector<int> events;
  for (const auto& r : rows->records()) {
    times.push_back(r.time);
    events.push_back(r.status);
  }
  const auto km = hazard::kaplan_meier(times, events);
  const auto var = hazard::greenwood_variance(km);
  const auto band = hazard::cloglog_confidence_band(km, var.variance, alpha);

  std::ostringstream out;
  out << "time,survival,at_risk,events,lower,upper\n";
  for (std::size_t j = 0; j < km.times.size(); ++j) {
    out << num(km.times[j]) << ',' << num(km.survival[j]) << ',' << km.at_risk[j] << ','
        << km.events_at[j] << ',' << num(band.lower[j]) << ',' << num(band.upper[j]) << '\n';
  }
  const auto path = std::filesystem::path(cfg.out_dir) / ("km_" + split + ".csv");
  write_text(path, out.str());
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int run_fit(BenchConfig cfg, const std::string& model_arg, bool print_hazard_ratios) {
  const std::string model = canonical_model(model_arg);
  cfg.models = {model};

  const auto full = hazard::load_csv(cfg.data_path);
  const auto [train, test] = hazard::split_paper(full);
  const auto st =
      hazard::fit_standardization(cfg.standardize_all ? full : train, cfg.encoding);
  const auto train_design = hazard::build_design(train, st);
  const auto test_design = hazard::build_design(test, st);
  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);

  if (model == "weibull") {
    const auto fit = hazard::fit_weibull_mle(train_design.times, train_design.events);
    std::cout << "shape=" << num(fit.shape) << " scale=" << num(fit.scale)
              << " loglik=" << num(fit.loglik)
              << " median=" << num(hazard::weibull_median(fit.shape, fit.scale)) << '\n';
  } else if (model == "weibull-aft") {
    const auto fit = hazard::fit_weibull_aft_mle(train_design);
    std::cout << "shape=" << num(fit.shape) << " loglik=" << num(fit.loglik) << '\n';
    std::cout << "intercept=" << num(fit.beta[0]) << '\n';
    for (std::size_t j = 0; j < st.column_names.size(); ++j) {
      std::cout << st.column_names[j] << '=' << num(fit.beta[static_cast<Eigen::Index>(j) + 1])
                << '\n';
    }
  } else if (model == "weibull-aft-bayes" || model == "aft-frailty-bayes") {
    auto bayes_config = cfg.bayes;
    bayes_config.seed = cfg.seed;
    const auto kind = model == "weibull-aft-bayes" ? hazard::BayesModel::kAft
                                                   : hazard::BayesModel::kAftFrailty;
    const auto fit = hazard::fit_bayes(kind, train_design, bayes_config);

    std::ostringstream draws;
    for (std::size_t j = 0; j < fit.merged.param_names.size(); ++j) {
      draws << (j ? "," : "") << fit.merged.param_names[j];
    }
    draws << '\n';
    for (Eigen::Index r = 0; r < fit.merged.draws.rows(); ++r) {
      for (Eigen::Index c = 0; c < fit.merged.draws.cols(); ++c) {
        draws << (c ? "," : "") << num(fit.merged.draws(r, c));
      }
      draws << '\n';
    }
    write_text(out_dir / ("draws_" + model + ".csv"), draws.str());

    nlohmann::json diag;
    diag["model"] = model;
    diag["chains"] = bayes_config.chains;
    diag["steps"] = bayes_config.steps;
    diag["burn"] = bayes_config.burn;
    diag["seed"] = bayes_config.seed;
    for (std::size_t j = 0; j < fit.merged.param_names.size(); ++j) {
      diag["rhat"][fit.merged.param_names[j]] = fit.rhat[static_cast<Eigen::Index>(j)];
      diag["posterior_mean"][fit.merged.param_names[j]] =
          fit.merged.draws.col(static_cast<Eigen::Index>(j)).mean();
    }
    diag["acceptance"] = fit.chain_acceptance;
    write_text(out_dir / ("diagnostics_" + model + ".json"), diag.dump(2) + "\n");
    std::cout << "rhat_max=" << num(fit.rhat.maxCoeff()) << " draws_kept="
              << fit.merged.draws.rows() << '\n';
  } else if (model == "coxph") {
    const auto fit = hazard::fit_coxph(train_design);
    const auto rows = hazard::hazard_ratios(fit, st);
    std::ostringstream t3;
    t3 << "covariate,hazard_ratio,ci_lower,ci_upper\n";
    for (const auto& row : rows) {
      t3 << row.covariate << ',' << num(row.hazard_ratio) << ',' << num(row.ci_lower) << ','
         << num(row.ci_upper) << '\n';
    }
    write_text(out_dir / "hazard_ratios.csv", t3.str());
    if (print_hazard_ratios) {
      char line[128];
      std::snprintf(line, sizeof(line), "%-12s %12s %10s %10s\n", "covariate", "hazard_ratio",
                    "ci_lower", "ci_upper");
      std::cout << line;
      for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%-12s %12.4f %10.4f %10.4f\n", row.covariate.c_str(),
                      row.hazard_ratio, row.ci_lower, row.ci_upper);
        std::cout << line;
      }
    }
    std::cout << "partial_loglik=" << num(fit.loglik_partial) << " iterations="
              << fit.iterations << '\n';
  } else if (model == "rsf") {
    auto forest_config = cfg.rsf;
    forest_config.seed = cfg.seed;
    const auto forest = hazard::fit_rsf(train_design, forest_config);

    // Depth statistics over the ensemble (root depth 0).
    double depth_sum = 0.0;
    int leaf_total = 0;
    std::function<void(const hazard::SurvivalTreeNode*, int)> walk =
        [&](const hazard::SurvivalTreeNode* node, int depth) {
          if (node->is_leaf()) {
            depth_sum += depth;
            ++leaf_total;
            return;
          }
          walk(node->left.get(), depth + 1);
          walk(node->right.get(), depth + 1);
        };
    for (const auto& tree : forest.trees) walk(tree.get(), 0);

    nlohmann::json summary;
    summary["trees"] = forest_config.n_trees;
    summary["average_leaf_depth"] = depth_sum / leaf_total;
    summary["leaves_per_tree"] = static_cast<double>(leaf_total) / forest_config.n_trees;
    write_text(out_dir / "forest_rsf.json", summary.dump(2) + "\n");
    std::cout << "trees=" << forest_config.n_trees
              << " avg_leaf_depth=" << num(depth_sum / leaf_total) << '\n';
  } else {  // deepsurv
    auto net_config = cfg.deepsurv;
    net_config.seed = cfg.seed;
    const auto fit = hazard::train_deepsurv(train_design, net_config);

    std::ostringstream loss;
    loss << "epoch,loss\n";
    for (std::size_t e = 0; e < fit.loss_history.size(); ++e) {
      loss << e << ',' << num(fit.loss_history[e]) << '\n';
    }
    write_text(out_dir / "loss_deepsurv.csv", loss.str());

    // Flat layout: W1 row-major, b1, w2, b2.
    const Eigen::VectorXd flat = hazard::pack_parameters(fit.net);
    std::ostringstream weights;
    weights << "value\n";
    for (Eigen::Index k = 0; k < flat.size(); ++k) weights << num(flat[k]) << '\n';
    write_text(out_dir / "weights_deepsurv.csv", weights.str());
    std::cout << "initial_loss=" << num(fit.loss_history.front())
              << " final_loss=" << num(fit.final_loss) << '\n';
  }

  // Evaluation on the held-out rows through the benchmark path.
  auto bench_cfg = cfg;
  bench_cfg.models = {model};
  const auto result = hazard::run_benchmark(bench_cfg);
  std::cout << hazard::emit_report(result.outcomes);
  return result.any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survival-analysis benchmark harness"};
  app.require_subcommand(1);

  // data validate <path>
  auto* data_cmd = app.add_subcommand("data", "dataset utilities");
  data_cmd->require_subcommand(1);
  auto* validate_cmd = data_cmd->add_subcommand("validate", "parse and report a dataset");
  std::string validate_path;
  validate_cmd->add_option("path", validate_path, "CSV path")->required();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit one model and write its artifacts");
  CommonFlags fit_common;
  ModelFlags fit_model_flags;
  fit_common.attach(fit_cmd);
  fit_model_flags.attach(fit_cmd);
  std::string fit_model;
  bool fit_hazard_ratios = false;
  fit_cmd->add_option("--model", fit_model, "model name")->required();
  fit_cmd->add_flag("--hazard-ratios", fit_hazard_ratios, "print the hazard-ratio table");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the full benchmark pipeline");
  CommonFlags bench_common;
  ModelFlags bench_model_flags;
  bench_common.attach(bench_cmd);
  bench_model_flags.attach(bench_cmd);

  // contours
  auto* contours_cmd = app.add_subcommand("contours", "relative-likelihood grid");
  CommonFlags contours_common;
  contours_common.attach(contours_cmd);
  int contours_resolution = 0;
  contours_cmd->add_option("--resolution", contours_resolution, "grid points per axis");

  // curves
  auto* curves_cmd = app.add_subcommand("curves", "Kaplan-Meier curve with confidence band");
  CommonFlags curves_common;
  curves_common.attach(curves_cmd);
  std::string curves_split = "train";
  double curves_alpha = 0.05;
  curves_cmd->add_option("--split", curves_split, "row subset")
      ->check(CLI::IsMember({"full", "train", "test"}));
  curves_cmd->add_option("--alpha", curves_alpha, "band miscoverage level");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return run_data_validate(validate_path);
    if (fit_cmd->parsed()) {
      auto cfg = fit_common.resolve(fit_cmd);
      fit_model_flags.apply(fit_cmd, cfg);
      return run_fit(cfg, fit_model, fit_hazard_ratios);
    }
    if (bench_cmd->parsed()) {
      auto cfg = bench_common.resolve(bench_cmd);
      bench_model_flags.apply(bench_cmd, cfg);
      return run_bench(cfg);
    }
    if (contours_cmd->parsed()) {
      auto cfg = contours_common.resolve(contours_cmd);
      const int resolution =
          contours_cmd->count("--resolution") ? contours_resolution : cfg.contour_resolution;
      return run_contours(cfg, resolution);
    }
    if (curves_cmd->parsed()) {
      return run_curves(curves_common.resolve(curves_cmd), curves_split, curves_alpha);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
