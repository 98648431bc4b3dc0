#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renyi_fs/data.hpp"
#include "renyi_fs/evaluation.hpp"
#include "renyi_fs/selection.hpp"

namespace renyi_fs {

inline constexpr int kSchemaVersion = 1;

/// Everything a run depends on. Together with the input file this fully
/// determines the report, timings aside.
struct RunConfig {
  std::string input;
  std::string label;  // empty: last column
  SelectionConfig selection;
  Eigen::Index max_samples = 1000;
  bool bootstrap = false;
  int runs = 100;
  double significance = 0.05;
};

struct RunReport {
  RunConfig config;
  Eigen::Index n_samples = 0;
  Eigen::Index n_features = 0;
  std::vector<std::string> feature_names;
  SelectionTrace trace;
  std::optional<BootstrapResult> bootstrap;
  std::map<std::string, double> timings_ms;
};

/// Loads and subsamples the input named by the config.
Dataset load_input(const RunConfig &config);

RunReport run_select(const RunConfig &config);

struct CurveRow {
  std::size_t step = 0;
  std::string feature;
  double mi_bits = 0.0;
  double cmi_bits = 0.0;
  std::optional<BootstrapResult> accuracy;
};

/// Exhaustive greedy ordering (no stopping rule) with optional bootstrap
/// accuracy of each prefix.
std::vector<CurveRow> run_curves(const RunConfig &config);
std::string curves_tsv(const std::vector<CurveRow> &rows);

struct CriterionOutcome {
  std::string criterion;
  std::size_t count = 0;
  std::optional<double> accuracy;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  int rank = 0;
};

struct DatasetComparison {
  std::string name;
  std::size_t optimal = 0;
  double optimal_accuracy = 0.0;
  std::vector<CriterionOutcome> criteria;
};

struct RankSumOutcome {
  std::string a;
  std::string b;
  double p_value = 1.0;
  bool reject = false;
};

struct ComparisonReport {
  std::vector<DatasetComparison> datasets;
  std::vector<std::string> criteria;
  std::vector<double> average_ranks;
  std::vector<RankSumOutcome> rank_sum_tests;
  double rank_sum_significance = 0.1;
};

/// Runs the four stopping criteria on each input, estimates the optimal
/// subset size from the bootstrap curve (paired t-test at `t_test_level`) and
/// compares the criteria's rank columns pairwise.
ComparisonReport run_compare(const std::vector<RunConfig> &inputs, double t_test_level, double rank_sum_level);

nlohmann::json to_json(const RunConfig &config);
RunConfig run_config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const RunReport &report);
RunReport run_report_from_json(const nlohmann::json &j);
nlohmann::json to_json(const ComparisonReport &report);

}  // namespace renyi_fs
