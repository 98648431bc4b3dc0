// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "renyi_fs/data.hpp"
#include "renyi_fs/entropy.hpp"
#include "renyi_fs/evaluation.hpp"
#include "renyi_fs/selection.hpp"
#include "renyi_fs/synthetic.hpp"

using namespace renyi_fs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Eigen::VectorXd normal_column(std::mt19937 &rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd col(n);
  for (Eigen::Index i = 0; i < n; ++i) col(i) = normal(rng);
  return col;
}

std::vector<Gram> random_grams(std::mt19937 &rng, Eigen::Index n, int count) {
  std::vector<Gram> grams;
  for (int k = 0; k < count; ++k) {
    const Eigen::VectorXd col = normal_column(rng, n);
    grams.push_back(gram_gaussian(col, median_bandwidth(col)));
  }
  return grams;
}

std::vector<int> random_labels(std::mt19937 &rng, std::size_t n, int classes) {
  std::vector<int> y(n);
  for (auto &v : y) v = static_cast<int>(rng() % static_cast<unsigned>(classes));
  return y;
}

Outcome entropy_fixtures() {
  double worst = 0.0;
  const auto check = [&](const std::vector<int> &y, double alpha, double expected) {
    worst = std::max(worst, std::abs(renyi_entropy(gram_delta(y), Alpha(alpha)) - expected));
  };
  for (double a : {0.5, 1.01, 2.0, 5.0}) {
    check({0, 0, 1, 1}, a, 1.0);
    check({0, 1, 2, 3}, a, 2.0);
  }
  std::mt19937 rng(101);
  for (int t = 0; t < 200; ++t) {
    const int classes = 1 + static_cast<int>(rng() % 6);
    const auto y = random_labels(rng, 5 + rng() % 60, classes);
    for (double a : {0.5, 1.01, 2.0, 3.0}) check(y, a, oracle::renyi_bits(oracle::class_proportions(y), a));
  }
  return {worst < 1e-10, fmt("max |error| %.3g bits (tol 1e-10)", worst)};
}

Outcome joint_entropy_bounds() {
  std::mt19937 rng(202);
  // Worst violation and violation count per inequality: partition upper,
  // partition lower, sum upper, max lower.
  std::array<double, 4> worst{};
  std::array<int, 4> count{};
  std::string where;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng() % 46);
    const int f = 2 + static_cast<int>(rng() % 3);
    const auto grams = random_grams(rng, n, f);
    // Random complementary partition, both sides non-empty.
    std::vector<Gram> left, right;
    const unsigned mask = 1 + rng() % ((1u << f) - 2);
    for (int k = 0; k < f; ++k) ((mask >> k) & 1u ? left : right).push_back(grams[static_cast<std::size_t>(k)]);
    for (double av : {1.01, 2.0}) {
      const Alpha a(av);
      const double joint = joint_entropy(grams, a);
      const double jl = joint_entropy(left, a), jr = joint_entropy(right, a);
      double sum = 0.0, mx = 0.0;
      for (const auto &g : grams) {
        const double h = renyi_entropy(g, a);
        sum += h;
        mx = std::max(mx, h);
      }
      const std::array<double, 4> v{joint - (jl + jr), std::max(jl, jr) - joint, joint - sum, mx - joint};
      for (std::size_t q = 0; q < 4; ++q) {
        worst[q] = std::max(worst[q], v[q]);
        if (v[q] > 1e-8) {
          ++count[q];
          if (q == 2) where += fmt(" (dataset %d: n=%ld, %d features, alpha=%g)", t, static_cast<long>(n), f, av);
        }
      }
    }
  }
  const bool pass = *std::max_element(worst.begin(), worst.end()) <= 1e-8;
  return {pass, fmt("violations > 1e-8 [count, worst bits]: partition upper [%d, %.3g], partition lower [%d, %.3g], "
                    "sum upper [%d, %.3g], max lower [%d, %.3g]%s",
                    count[0], worst[0], count[1], worst[1], count[2], worst[2], count[3], worst[3], where.c_str())};
}

Outcome identities() {
  std::mt19937 rng(303);
  double chain = 0.0, blanket = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng() % 41);
    const int f = 2 + static_cast<int>(rng() % 3);
    const auto grams = random_grams(rng, n, f);
    const Gram y = gram_delta(random_labels(rng, static_cast<std::size_t>(n), 2 + static_cast<int>(rng() % 2)));
    const Alpha a(t % 2 ? 2.0 : 1.01);

    std::vector<std::size_t> order(static_cast<std::size_t>(f));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t k = 1 + rng() % static_cast<unsigned>(f - 1);  // |S'| in [1, f-1]
    std::vector<Gram> sp, sx, x{grams[order[k]]}, rest;
    for (std::size_t i = 0; i < k; ++i) sp.push_back(grams[order[i]]);
    sx = sp;
    sx.push_back(x.front());
    for (std::size_t i = k; i < order.size(); ++i) rest.push_back(grams[order[i]]);
    chain = std::max(chain, std::abs(mutual_information(y, sx, a) - mutual_information(y, sp, a) -
                                     conditional_mutual_information(x, y, sp, a)));
    // M = S', S - M = rest.
    blanket = std::max(blanket, std::abs(conditional_mutual_information(rest, y, sp, a) -
                                         mutual_information(y, grams, a) + mutual_information(y, sp, a)));
  }
  return {chain < 1e-8 && blanket < 1e-8, fmt("max chain residual %.3g, max blanket residual %.3g (tol 1e-8)", chain, blanket)};
}

Outcome synthetic_stopping() {
  int in_range = 0;
  double perm_total = 0.0, chi2_total = 0.0;
  std::string counts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset d = make_linear_synthetic(300, 5, 15, 1000 + seed);
    SelectionConfig config;
    config.alpha = Alpha(1.01);
    config.criterion = Criterion::CmiPermutation;
    config.permutations = 100;
    config.theta = 0.95;
    config.seed = seed;
    const std::size_t perm = greedy_select(d, config).selected().size();
    config.criterion = Criterion::DeltaMiChi2;
    const std::size_t chi2 = greedy_select(d, config).selected().size();
    in_range += perm >= 3 && perm <= 8;
    perm_total += static_cast<double>(perm);
    chi2_total += static_cast<double>(chi2);
    counts += fmt("%s%zu/%zu", counts.empty() ? "" : " ", perm, chi2);
  }
  const double perm_mean = perm_total / 20.0, chi2_mean = chi2_total / 20.0;
  return {in_range >= 16 && chi2_mean < perm_mean,
          fmt("cmi-permutation in [3, 8] for %d/20 seeds (need 16); mean count cmi-permutation %.2f, dmi-chi2 %.2f "
              "(per seed %s)",
              in_range, perm_mean, chi2_mean, counts.c_str())};
}

Outcome benchmark_rank_sums() {
  const std::vector<double> heuristic{1, 1, 4, 4, 1, 1, 1, 3, 1, 2};
  const std::vector<double> chi2{4, 1, 3, 3, 4, 4, 4, 4, 2, 1};
  const std::vector<double> mi_permutation{2, 1, 1, 2, 2, 2, 2, 1, 4, 3};
  const TestResult a = wilcoxon_rank_sum(heuristic, chi2, 0.1);
  const TestResult b = wilcoxon_rank_sum(heuristic, mi_permutation, 0.1);
  const bool pass = std::abs(a.p_value - 0.0781) < 5e-3 && a.reject && std::abs(b.p_value - 0.5455) < 5e-3 && !b.reject;
  return {pass, fmt("heuristic vs dmi-chi2 p = %.4f (%s), heuristic vs mi-permutation p = %.4f (%s)", a.p_value,
                    a.reject ? "reject" : "keep", b.p_value, b.reject ? "reject" : "keep")};
}

Outcome waveform_curve() {
  const fs::path csv = fs::path(RENYI_FS_DATA_DIR) / "waveform.csv";
  const Dataset d =
      fs::exists(csv) ? subsample(load_csv(csv, parse_label_column("class")), 1000, 0) : make_waveform(1000, 1);
  const std::size_t f = static_cast<std::size_t>(d.num_features());

  SelectionConfig config;
  config.criterion = Criterion::None;
  const SelectionTrace curve = greedy_select(d, config);
  double mi_drop = 0.0, cmi_rise = 0.0, drift = 0.0;
  const double constant = curve.steps.front().mi + curve.steps.front().cmi;
  for (std::size_t t = 0; t < curve.steps.size(); ++t) {
    const auto &s = curve.steps[t];
    drift = std::max(drift, std::abs(s.mi + s.cmi - constant));
    if (t == 0) continue;
    mi_drop = std::max(mi_drop, curve.steps[t - 1].mi - s.mi);
    cmi_rise = std::max(cmi_rise, s.cmi - curve.steps[t - 1].cmi);
  }

  config.criterion = Criterion::CmiHeuristic;
  const std::vector<std::size_t> chosen = greedy_select(d, config).selected();
  const std::vector<Eigen::Index> subset(chosen.begin(), chosen.end());
  std::vector<Eigen::Index> all(f);
  std::iota(all.begin(), all.end(), 0);
  const double acc_stop = bootstrap_accuracy(d, subset, 100, 0).mean;
  const double acc_full = bootstrap_accuracy(d, all, 100, 0).mean;

  const bool pass = curve.steps.size() == f && mi_drop <= 1e-6 && cmi_rise <= 1e-6 && drift < 1e-8 &&
                    chosen.size() > 1 && chosen.size() < f && std::abs(acc_stop - acc_full) <= 0.02;
  return {pass, fmt("max MI drop %.3g, max CMI rise %.3g, MI+CMI drift %.3g; cmi-heuristic stops at %zu of %zu; "
                    "accuracy %.2f%% vs %.2f%% with all features",
                    mi_drop, cmi_rise, drift, chosen.size(), f, 100 * acc_stop, 100 * acc_full)};
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the timings object, line by line, leaving every other byte intact.
std::string strip_timings(const std::string &text) {
  std::istringstream in(text);
  std::string line, out;
  bool skipping = false;
  while (std::getline(in, line)) {
    if (!skipping && line.find("\"timings_ms\"") != std::string::npos) {
      skipping = line.find('}') == std::string::npos;
      continue;
    }
    if (skipping) {
      if (line.find('}') != std::string::npos) skipping = false;
      continue;
    }
    out += line + "\n";
  }
  return out;
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("renyi_fs_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path input = fs::path(RENYI_FS_DATA_DIR) / "linear_synthetic.csv";
  std::vector<std::string> texts;
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / ("run" + std::to_string(k) + ".json");
    const std::string cmd = std::string(RENYI_SELECT_EXE) + " select --input " + input.string() +
                            " --label y --criterion cmi-permutation --permutations 20 --seed 7 --bootstrap --runs 20" +
                            " --output " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      fs::remove_all(dir);
      return {false, fmt("renyi-select exited with status %d", status)};
    }
    texts.push_back(slurp(out));
  }
  fs::remove_all(dir);
  const std::string a = strip_timings(texts[0]), b = strip_timings(texts[1]);
  const bool has_timings = texts[0].find("\"timings_ms\"") != std::string::npos;
  return {has_timings && a == b && !a.empty(),
          fmt("%zu bytes without timings, %s", a.size(), a == b ? "identical" : "different")};
}

Outcome small_oracles() {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t n1 = 1; n1 <= 6; ++n1)
    for (std::size_t n2 = 1; n2 <= 6; ++n2)
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> a(n1), b(n2);
        for (auto &v : a) v = u(rng);
        for (auto &v : b) v = u(rng) + 0.3 * rep;
        worst = std::max(worst, std::abs(wilcoxon_rank_sum(a, b, 0.1).p_value - oracle::rank_sum_enumeration(a, b)));
      }
  const double q = chi2_quantile(1, 0.95);
  const double reference = oracle::chi2_quantile_bisect(0.95, 1);
  const bool pass = worst < 1e-6 && std::abs(q - 3.8415) <= 1e-3 && std::abs(q - reference) <= 1e-3;
  return {pass, fmt("rank-sum max |p - enumeration| %.3g; chi2_quantile(1, 0.95) = %.5f, quadrature %.5f", worst, q,
                    reference)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analytic entropy fixtures", entropy_fixtures},
      {"joint-entropy inequalities", joint_entropy_bounds},
      {"chain and Markov-blanket identities", identities},
      {"stopping on synthetic ground truth", synthetic_stopping},
      {"benchmark rank-sum p-values", benchmark_rank_sums},
      {"waveform MI/CMI curve and stop point", waveform_curve},
      {"CLI determinism", cli_determinism},
      {"small-instance oracles", small_oracles},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
