#include "renyi_fs/report.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "renyi_fs/error.hpp"

namespace renyi_fs {

using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename T>
json optional_json(const std::optional<T> &v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json decision_json(const StopDecision &d) {
  json j{{"decision", std::string(to_string(d.decision))}, {"statistic", d.statistic}, {"threshold", d.threshold}};
  if (d.detail.exceedances) j["exceedances"] = *d.detail.exceedances;
  if (d.detail.permutations) j["permutations"] = *d.detail.permutations;
  if (d.detail.degrees_of_freedom) j["degrees_of_freedom"] = *d.detail.degrees_of_freedom;
  if (d.detail.observed) j["observed"] = *d.detail.observed;
  if (!d.detail.note.empty()) j["note"] = d.detail.note;
  return j;
}

StopDecision decision_from_json(const json &j) {
  StopDecision d;
  const auto name = j.at("decision").get<std::string>();
  if (name != "stop" && name != "continue") throw Error(ErrorCode::InvalidReport, "unknown decision '" + name + "'");
  d.decision = name == "stop" ? Decision::Stop : Decision::Continue;
  d.statistic = j.at("statistic").get<double>();
  d.threshold = j.at("threshold").get<double>();
  d.detail.exceedances = optional_from<int>(j, "exceedances");
  d.detail.permutations = optional_from<int>(j, "permutations");
  d.detail.degrees_of_freedom = optional_from<double>(j, "degrees_of_freedom");
  d.detail.observed = optional_from<double>(j, "observed");
  d.detail.note = j.value("note", std::string());
  return d;
}

json bootstrap_json(const BootstrapResult &b) {
  return json{{"n_features", b.n_features}, {"mean", b.mean},         {"ci_low", b.ci_low},
              {"ci_high", b.ci_high},       {"runs", b.run_accuracies.size()}, {"run_accuracies", b.run_accuracies}};
}

BootstrapResult bootstrap_from_json(const json &j) {
  BootstrapResult b;
  b.n_features = j.at("n_features").get<std::size_t>();
  b.mean = j.at("mean").get<double>();
  b.ci_low = j.at("ci_low").get<double>();
  b.ci_high = j.at("ci_high").get<double>();
  b.run_accuracies = j.at("run_accuracies").get<std::vector<double>>();
  return b;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runs

Dataset load_input(const RunConfig &config) {
  if (config.max_samples < 1) throw Error(ErrorCode::InvalidConfig, "max-samples must be >= 1");
  const LabelColumn label = config.label.empty() ? LabelColumn{} : parse_label_column(config.label);
  Dataset d = load_csv(config.input, label);
  if (d.n() > config.max_samples) return subsample(d, config.max_samples, config.selection.seed);
  return d;
}

RunReport run_select(const RunConfig &config) {
  config.selection.validate();
  if (config.bootstrap && config.runs < 1) throw Error(ErrorCode::InvalidConfig, "runs must be >= 1");
  RunReport report;
  report.config = config;

  Stopwatch load_clock;
  const Dataset d = load_input(config);
  report.timings_ms["load"] = load_clock.elapsed_ms();
  report.n_samples = d.n();
  report.n_features = d.num_features();
  report.feature_names = d.feature_names();

  Stopwatch select_clock;
  report.trace = greedy_select(d, config.selection);
  report.timings_ms["select"] = select_clock.elapsed_ms();

  if (config.bootstrap && !report.trace.steps.empty()) {
    Stopwatch boot_clock;
    std::vector<Eigen::Index> subset;
    for (std::size_t f : report.trace.selected()) subset.push_back(static_cast<Eigen::Index>(f));
    report.bootstrap = bootstrap_accuracy(d, subset, config.runs, config.selection.seed);
    report.timings_ms["bootstrap"] = boot_clock.elapsed_ms();
  }
  return report;
}

std::vector<CurveRow> run_curves(const RunConfig &config) {
  RunConfig exhaustive = config;
  exhaustive.selection.criterion = Criterion::None;
  const Dataset d = load_input(exhaustive);
  const SelectionTrace trace = greedy_select(d, exhaustive.selection);

  std::vector<CurveRow> rows(trace.steps.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].step = k + 1;
    rows[k].feature = trace.steps[k].name;
    rows[k].mi_bits = trace.steps[k].mi;
    rows[k].cmi_bits = trace.steps[k].cmi;
  }
  if (config.bootstrap) {
    std::vector<Eigen::Index> prefix;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      prefix.push_back(static_cast<Eigen::Index>(trace.steps[k].feature));
      rows[k].accuracy = bootstrap_accuracy(d, prefix, config.runs, config.selection.seed);
    }
  }
  return rows;
}

std::string curves_tsv(const std::vector<CurveRow> &rows) {
  const bool with_accuracy = !rows.empty() && rows.front().accuracy.has_value();
  std::ostringstream out;
  out << "step\tfeature\tmi_bits\tcmi_bits";
  if (with_accuracy) out << "\tacc_mean\tci_low\tci_high";
  out << '\n';
  for (const auto &r : rows) {
    out << r.step << '\t' << r.feature << '\t' << format_number(r.mi_bits) << '\t' << format_number(r.cmi_bits);
    if (with_accuracy)
      out << '\t' << format_number(r.accuracy->mean) << '\t' << format_number(r.accuracy->ci_low) << '\t'
          << format_number(r.accuracy->ci_high);
    out << '\n';
  }
  return out.str();
}

ComparisonReport run_compare(const std::vector<RunConfig> &inputs, double t_test_level, double rank_sum_level) {
  if (inputs.empty()) throw Error(ErrorCode::EmptyInput, "no datasets to compare");
  const std::vector<Criterion> criteria{Criterion::CmiHeuristic, Criterion::CmiPermutation, Criterion::MiPermutation,
                                        Criterion::DeltaMiChi2};
  ComparisonReport report;
  report.rank_sum_significance = rank_sum_level;
  for (Criterion c : criteria) report.criteria.emplace_back(to_string(c));
  RankTable table(report.criteria);

  for (const RunConfig &base : inputs) {
    RunConfig curve_config = base;
    curve_config.bootstrap = true;
    const std::vector<CurveRow> curve = run_curves(curve_config);
    std::vector<BootstrapResult> accuracies;
    for (const auto &row : curve) accuracies.push_back(*row.accuracy);

    DatasetComparison cmp;
    cmp.name = base.input;
    cmp.optimal = optimal_feature_count(accuracies, t_test_level);
    cmp.optimal_accuracy = accuracies[cmp.optimal - 1].mean;

    std::vector<std::size_t> counts;
    for (Criterion c : criteria) {
      RunConfig run = base;
      run.selection.criterion = c;
      run.bootstrap = false;
      const RunReport r = run_select(run);
      CriterionOutcome outcome;
      outcome.criterion = std::string(to_string(c));
      outcome.count = r.trace.steps.size();
      if (outcome.count > 0) {
        const BootstrapResult &acc = accuracies[outcome.count - 1];
        outcome.accuracy = acc.mean;
        outcome.ci_low = acc.ci_low;
        outcome.ci_high = acc.ci_high;
      }
      counts.push_back(outcome.count);
      cmp.criteria.push_back(std::move(outcome));
    }
    table.add_dataset(cmp.name, counts, cmp.optimal);
    for (std::size_t c = 0; c < counts.size(); ++c) cmp.criteria[c].rank = table.ranks().back()[c];
    report.datasets.push_back(std::move(cmp));
  }

  report.average_ranks = table.average_ranks();
  for (std::size_t a = 0; a < criteria.size(); ++a)
    for (std::size_t b = a + 1; b < criteria.size(); ++b) {
      const TestResult t = wilcoxon_rank_sum(table.rank_column(a), table.rank_column(b), rank_sum_level);
      report.rank_sum_tests.push_back({report.criteria[a], report.criteria[b], t.p_value, t.reject});
    }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const RunConfig &c) {
  const SelectionConfig &s = c.selection;
  return json{{"input", c.input},
              {"label", c.label},
              {"criterion", std::string(to_string(s.criterion))},
              {"alpha", s.alpha.value()},
              {"epsilon", s.epsilon},
              {"permutations", s.permutations},
              {"theta", s.theta},
              {"chi2_bins", s.chi2_bins},
              {"seed", s.seed},
              {"max_samples", c.max_samples},
              {"max_features", optional_json(s.max_features)},
              {"bootstrap", c.bootstrap},
              {"runs", c.runs},
              {"significance", c.significance}};
}

RunConfig run_config_from_json(const json &j) {
  try {
    RunConfig c;
    c.input = j.at("input").get<std::string>();
    c.label = j.at("label").get<std::string>();
    c.selection.criterion = parse_criterion(j.at("criterion").get<std::string>());
    c.selection.alpha = Alpha(j.at("alpha").get<double>());
    c.selection.epsilon = j.at("epsilon").get<double>();
    c.selection.permutations = j.at("permutations").get<int>();
    c.selection.theta = j.at("theta").get<double>();
    c.selection.chi2_bins = j.at("chi2_bins").get<int>();
    c.selection.seed = j.at("seed").get<std::uint64_t>();
    c.selection.max_features = optional_from<std::size_t>(j, "max_features");
    c.max_samples = j.at("max_samples").get<Eigen::Index>();
    c.bootstrap = j.at("bootstrap").get<bool>();
    c.runs = j.at("runs").get<int>();
    c.significance = j.at("significance").get<double>();
    return c;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::InvalidReport, e.what());
  }
}

json to_json(const RunReport &r) {
  json selected = json::array();
  json steps = json::array();
  for (std::size_t k = 0; k < r.trace.steps.size(); ++k) {
    const SelectionStep &s = r.trace.steps[k];
    selected.push_back({{"index", s.feature}, {"name", s.name}});
    steps.push_back({{"step", k + 1},
                     {"feature", s.feature},
                     {"name", s.name},
                     {"mi_bits", s.mi},
                     {"cmi_bits", s.cmi},
                     {"criterion", decision_json(s.decision)}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"config", to_json(r.config)},
              {"dataset", {{"n_samples", r.n_samples}, {"n_features", r.n_features}, {"feature_names", r.feature_names}}},
              {"total_mi_bits", r.trace.total_mi},
              {"selected", selected},
              {"steps", steps},
              {"stop_reason", r.trace.stop_reason},
              {"rejected_feature", optional_json(r.trace.rejected_feature)},
              {"final_decision", r.trace.final_decision ? decision_json(*r.trace.final_decision) : json(nullptr)},
              {"bootstrap", r.bootstrap ? bootstrap_json(*r.bootstrap) : json(nullptr)},
              {"timings_ms", r.timings_ms}};
}

RunReport run_report_from_json(const json &j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
      throw Error(ErrorCode::InvalidReport, "unsupported schema_version");
    RunReport r;
    r.config = run_config_from_json(j.at("config"));
    const json &ds = j.at("dataset");
    r.n_samples = ds.at("n_samples").get<Eigen::Index>();
    r.n_features = ds.at("n_features").get<Eigen::Index>();
    r.feature_names = ds.at("feature_names").get<std::vector<std::string>>();
    r.trace.total_mi = j.at("total_mi_bits").get<double>();
    for (const json &s : j.at("steps")) {
      SelectionStep step;
      step.feature = s.at("feature").get<std::size_t>();
      step.name = s.at("name").get<std::string>();
      step.mi = s.at("mi_bits").get<double>();
      step.cmi = s.at("cmi_bits").get<double>();
      step.decision = decision_from_json(s.at("criterion"));
      r.trace.steps.push_back(std::move(step));
    }
    r.trace.stop_reason = j.at("stop_reason").get<std::string>();
    r.trace.rejected_feature = optional_from<std::size_t>(j, "rejected_feature");
    if (!j.at("final_decision").is_null()) r.trace.final_decision = decision_from_json(j.at("final_decision"));
    if (!j.at("bootstrap").is_null()) r.bootstrap = bootstrap_from_json(j.at("bootstrap"));
    r.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
    return r;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::InvalidReport, e.what());
  }
}

json to_json(const ComparisonReport &r) {
  json datasets = json::array();
  for (const auto &d : r.datasets) {
    json rows = json::array();
    for (const auto &c : d.criteria)
      rows.push_back({{"criterion", c.criterion},
                      {"count", c.count},
                      {"accuracy", optional_json(c.accuracy)},
                      {"ci_low", optional_json(c.ci_low)},
                      {"ci_high", optional_json(c.ci_high)},
                      {"rank", c.rank}});
    datasets.push_back(
        {{"name", d.name}, {"optimal", d.optimal}, {"optimal_accuracy", d.optimal_accuracy}, {"criteria", rows}});
  }
  json avg = json::object();
  for (std::size_t c = 0; c < r.criteria.size(); ++c) avg[r.criteria[c]] = r.average_ranks[c];
  json tests = json::array();
  for (const auto &t : r.rank_sum_tests)
    tests.push_back({{"a", t.a}, {"b", t.b}, {"p_value", t.p_value}, {"reject", t.reject ? 1 : 0}});
  return json{{"schema_version", kSchemaVersion},
              {"datasets", datasets},
              {"average_ranks", avg},
              {"rank_sum", {{"significance", r.rank_sum_significance}, {"tests", tests}}}};
}

}  // namespace renyi_fs
