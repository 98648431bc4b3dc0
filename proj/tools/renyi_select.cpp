// renyi-select: greedy Renyi-entropy feature selection from the command line.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "renyi_fs/error.hpp"
#include "renyi_fs/report.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::vector<std::string> inputs;
  std::string label;
  std::string criterion = "cmi-heuristic";
  double alpha = 1.01;
  double epsilon = 1e-4;
  int permutations = 100;
  double theta = 0.95;
  int chi2_bins = 5;
  std::uint64_t seed = 0;
  long long max_samples = 1000;
  std::size_t max_features = 0;
  bool bootstrap = false;
  int runs = 100;
  double significance = 0.05;
  std::string output;
  std::string replay;
};

void add_common(CLI::App &app, Flags &f) {
  app.add_option("--label", f.label, "Label column: header name or 0-based index (default: last column)");
  app.add_option("--alpha", f.alpha, "Renyi entropy order")->capture_default_str();
  app.add_option("--epsilon", f.epsilon, "CMI threshold for cmi-heuristic")->capture_default_str();
  app.add_option("--permutations", f.permutations, "Permutations per test")->capture_default_str();
  app.add_option("--theta", f.theta, "Test confidence level")->capture_default_str();
  app.add_option("--chi2-bins", f.chi2_bins, "Equal-frequency bins for dmi-chi2")->capture_default_str();
  app.add_option("--seed", f.seed, "Seed for all randomized steps")->capture_default_str();
  app.add_option("--max-samples", f.max_samples, "Stratified subsample cap")->capture_default_str();
  app.add_option("--max-features", f.max_features, "Upper bound on selected features (0: none)");
  app.add_option("--runs", f.runs, "Bootstrap runs")->capture_default_str();
  app.add_option("--output", f.output, "Output file (default: stdout)");
}

renyi_fs::RunConfig to_config(const Flags &f, const std::string &input) {
  renyi_fs::RunConfig c;
  c.input = input;
  c.label = f.label;
  c.selection.criterion = renyi_fs::parse_criterion(f.criterion);
  c.selection.alpha = renyi_fs::Alpha(f.alpha);
  c.selection.epsilon = f.epsilon;
  c.selection.permutations = f.permutations;
  c.selection.theta = f.theta;
  c.selection.chi2_bins = f.chi2_bins;
  c.selection.seed = f.seed;
  if (f.max_features > 0) c.selection.max_features = f.max_features;
  c.max_samples = f.max_samples;
  c.bootstrap = f.bootstrap;
  c.runs = f.runs;
  c.significance = f.significance;
  c.selection.validate();
  if (c.runs < 1) throw renyi_fs::Error(renyi_fs::ErrorCode::InvalidConfig, "runs must be >= 1");
  return c;
}

void emit(const std::string &text, const std::string &path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw renyi_fs::Error(renyi_fs::ErrorCode::MissingFile, "cannot write " + path);
  out << text;
}

nlohmann::json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw renyi_fs::Error(renyi_fs::ErrorCode::MissingFile, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw renyi_fs::Error(renyi_fs::ErrorCode::InvalidReport, e.what());
  }
}

int run_select(const Flags &f) {
  using namespace renyi_fs;
  if (!f.replay.empty()) {
    const RunReport previous = run_report_from_json(read_json(f.replay));
    const RunReport again = renyi_fs::run_select(previous.config);
    emit(to_json(again).dump(2) + "\n", f.output);
    if (again.trace.selected() != previous.trace.selected()) {
      std::cerr << "replay: selected sequence differs from " << f.replay << "\n";
      return kExitData;
    }
    return 0;
  }
  const RunReport report = renyi_fs::run_select(to_config(f, f.inputs.front()));
  emit(to_json(report).dump(2) + "\n", f.output);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Greedy feature selection with matrix-based Renyi entropy"};
  app.require_subcommand(1);
  Flags f;

  auto *select = app.add_subcommand("select", "Select features and write a JSON report");
  select->add_option("--input", f.inputs, "Input CSV with a header row")->expected(1);
  select->add_option("--criterion", f.criterion, "cmi-heuristic | cmi-permutation | mi-permutation | dmi-chi2 | none")
      ->capture_default_str();
  select->add_flag("--bootstrap", f.bootstrap, "Bootstrap the accuracy of the selected subset");
  select->add_option("--significance", f.significance, "Significance level (echoed in the report)")
      ->capture_default_str();
  select->add_option("--replay", f.replay, "Re-run the configuration stored in a report");
  add_common(*select, f);

  auto *curves = app.add_subcommand("curves", "Write MI/CMI curves of an exhaustive greedy run as TSV");
  curves->add_option("--input", f.inputs, "Input CSV with a header row")->expected(1);
  curves->add_flag("--bootstrap", f.bootstrap, "Add bootstrap accuracy columns");
  add_common(*curves, f);

  auto *compare = app.add_subcommand("compare", "Compare the four stopping criteria across datasets");
  compare->add_option("--input", f.inputs, "Input CSVs (repeat the flag or list several)");
  double rank_sum_level = 0.1;
  compare->add_option("--significance", rank_sum_level, "Rank-sum test level")->capture_default_str();
  add_common(*compare, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const bool needs_input = !(select->parsed() && !f.replay.empty());
  if (needs_input && f.inputs.empty()) {
    CLI::App *active = app.get_subcommands().front();
    std::cerr << "error: --input is required\n\n" << active->help();
    return kExitUsage;
  }

  try {
    if (select->parsed()) return run_select(f);
    if (curves->parsed()) {
      emit(renyi_fs::curves_tsv(renyi_fs::run_curves(to_config(f, f.inputs.front()))), f.output);
      return 0;
    }
    std::vector<renyi_fs::RunConfig> configs;
    for (const auto &input : f.inputs) configs.push_back(to_config(f, input));
    const auto report = renyi_fs::run_compare(configs, 0.05, rank_sum_level);
    emit(renyi_fs::to_json(report).dump(2) + "\n", f.output);
    return 0;
  } catch (const renyi_fs::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = e.code() == renyi_fs::ErrorCode::InvalidConfig || e.code() == renyi_fs::ErrorCode::InvalidAlpha ||
                       e.code() == renyi_fs::ErrorCode::InvalidPermutationCount;
    return usage ? kExitUsage : kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
