#pragma once

#include "hazard/bayes.hpp"
#include "hazard/dataset.hpp"
#include "hazard/deepsurv.hpp"
#include "hazard/metrics.hpp"
#include "hazard/rsf.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hazard {

inline const std::vector<std::string> kAllModels = {
    "weibull", "weibull-aft", "weibull-aft-bayes", "aft-frailty-bayes",
    "coxph", "rsf", "deepsurv"};

struct BenchConfig {
  std::string data_path = "data/gbsg.csv";
  std::vector<std::string> models = kAllModels;
  std::uint64_t seed = 7;
  std::string out_dir = "out";
  Encoding encoding = Encoding::kOrdinal;
  bool standardize_all = false;  // statistics from all rows instead of train
  RankBy rank_by = RankBy::kPredictedTime;

  // per-model blocks
  BayesFitConfig bayes;
  ForestConfig rsf;
  DeepSurvConfig deepsurv;
  int contour_resolution = 100;
  int curve_subjects = 10;
};

// Splits a comma-separated model list; unknown or empty names are errors.
std::vector<std::string> parse_model_list(const std::string& csv);

// Flat key-value config file with [model] sections; '#' comments. Unknown keys
// are errors. CLI flags override file values.
BenchConfig parse_config_file(const std::string& path, const BenchConfig& base);

// FNV-1a over the canonical serialization; changes iff a field changes.
std::uint64_t config_hash(const BenchConfig& config);
std::string config_canonical(const BenchConfig& config);

struct ModelOutcome {
  std::string model;
  bool ok = false;
  std::string error;
  double wall_seconds = 0.0;
  EvaluationReport report;
};

struct BenchResult {
  std::vector<ModelOutcome> outcomes;
  std::vector<std::string> files_written;
  bool any_failed = false;
};

// Full pipeline: load, split, fit every requested model, evaluate, and write
// table1/table2/table3, curves_<model>, contours, probplot and manifest.json
// into out_dir. A model failure is recorded and the rest still run.
BenchResult run_benchmark(const BenchConfig& config);

// Human-readable summary sorted by C-index descending.
std::string emit_report(const std::vector<ModelOutcome>& outcomes);

}  // namespace hazard
