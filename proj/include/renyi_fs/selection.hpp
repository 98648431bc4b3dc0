#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "renyi_fs/data.hpp"
#include "renyi_fs/entropy.hpp"
#include "renyi_fs/kernels.hpp"

namespace renyi_fs {

enum class Criterion { CmiHeuristic, CmiPermutation, MiPermutation, DeltaMiChi2, None };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

struct SelectionConfig {
  Alpha alpha{1.01};
  Criterion criterion = Criterion::CmiHeuristic;
  double epsilon = 1e-4;
  int permutations = 100;
  double theta = 0.95;
  int chi2_bins = 5;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_features;

  void validate() const;
};

/// Greedy search state over F features with cached Hadamard products.
///
/// Holds the per-feature Grams, the label Gram B, the Gram over all of S and
/// the running product over the selected set S' (constant Gram while S' is
/// empty), together with the joint entropies that every candidate evaluation
/// reuses. Read-only methods are safe to call concurrently; commit() is not.
class SelectionState {
 public:
  SelectionState(std::vector<Gram> single_grams, Gram label_gram, Alpha alpha);

  /// Gaussian Grams with median bandwidth per column plus a delta label Gram.
  /// Expects standardized features.
  static SelectionState from_dataset(const Dataset &standardized, Alpha alpha);

  Alpha alpha() const { return alpha_; }
  Eigen::Index n() const { return label_gram_.size(); }
  std::size_t num_features() const { return single_grams_.size(); }

  const std::vector<std::size_t> &selected() const { return selected_; }
  /// Ascending feature indices not yet selected.
  const std::vector<std::size_t> &remaining() const { return remaining_; }
  bool is_remaining(std::size_t x) const;

  const std::vector<Gram> &single_grams() const { return single_grams_; }
  const Gram &label_gram() const { return label_gram_; }
  const Gram &full_gram() const { return full_gram_; }
  const Gram &cached_selected_gram() const { return selected_gram_; }
  const Gram &cached_selected_label_gram() const { return selected_label_gram_; }

  double label_entropy() const { return label_entropy_; }
  /// I(S; y) over the full feature set.
  double total_mi() const { return total_mi_; }
  /// I(S'; y); 0 while S' is empty.
  double selected_mi() const;
  /// I(S - S'; y | S') from cached joint entropies.
  double residual_cmi() const;
  /// I(S' + {x}; y).
  double candidate_mi(std::size_t x) const;

  void commit(std::size_t x);

 private:
  Alpha alpha_;
  std::vector<Gram> single_grams_;
  Gram label_gram_;
  Gram full_gram_;
  Gram selected_gram_;
  Gram selected_label_gram_;
  std::vector<std::size_t> selected_;
  std::vector<std::size_t> remaining_;
  double label_entropy_ = 0.0;
  double full_joint_ = 0.0;        // J(S)
  double full_label_joint_ = 0.0;  // J(S, B)
  double total_mi_ = 0.0;
  double selected_joint_ = 0.0;        // J(S')
  double selected_label_joint_ = 0.0;  // J(S', B)
};

enum class Decision { Continue, Stop };
std::string_view to_string(Decision d);

/// Criterion-specific diagnostics.
struct StopDetail {
  std::optional<int> exceedances;
  std::optional<int> permutations;
  std::optional<double> degrees_of_freedom;
  /// Unpermuted statistic of a permutation test (CMI or MI, bits).
  std::optional<double> observed;
  std::string note;
};

struct StopDecision {
  Decision decision = Decision::Continue;
  double statistic = 0.0;
  double threshold = 0.0;
  StopDetail detail;
};

/// I(S' + {x}; y) for every remaining x, in remaining() order.
std::vector<double> score_candidates(const SelectionState &state);

/// Remaining feature maximizing I(S' + {x}; y); ties go to the lowest index.
std::size_t best_candidate(const SelectionState &state);

// Pure decision rules, separated from the estimators so they can be checked
// on their own.
StopDecision cmi_heuristic_decision(double statistic, double epsilon);
/// count = #{i : observed CMI >= permuted CMI_i}. Continue iff
/// count <= floor((1 - theta) * P).
StopDecision cmi_permutation_decision(int count, int permutations, double theta);
/// exceed = #{i : observed MI > permuted MI_i}. Continue iff
/// exceed >= ceil(theta * P).
StopDecision mi_permutation_decision(int exceed, int permutations, double theta);

/// Stop iff I(S - S' - cand; y | S' + cand) <= epsilon.
StopDecision criterion_cmi_heuristic(const SelectionState &state, std::size_t cand, double epsilon);

/// Permutation test of the residual CMI against P copies computed with the
/// candidate column shuffled (stream keyed by seed, |S'| and i).
StopDecision criterion_cmi_permutation(const SelectionState &state, std::size_t cand,
                                       int permutations, double theta, std::uint64_t seed);

/// Permutation test of I(S' + cand; y) against the shuffled candidate.
StopDecision criterion_mi_permutation(const SelectionState &state, std::size_t cand,
                                      int permutations, double theta, std::uint64_t seed);

/// p-quantile of the chi-square distribution with df degrees of freedom.
double chi2_quantile(double df, double p);

/// Plug-in I(x; y | z) in nats from contingency counts; z is the mixed-radix
/// cell code of the conditioning columns (all zeros when unconditioned).
double plugin_conditional_mi(std::span<const int> x, int x_card, std::span<const int> y, int y_card,
                             std::span<const int> z, int z_card);

/// G-test of the CMI increment: statistic 2 n I(cand; y | S') in nats against
/// the theta-quantile of chi2 with (c_x - 1)(C - 1) prod c_z degrees of freedom.
StopDecision criterion_delta_mi_chi2(const SelectionState &state, std::size_t cand,
                                     const DiscretizedView &discretized, double theta);

struct SelectionStep {
  std::size_t feature = 0;
  std::string name;
  double mi = 0.0;   // I(S'; y) after adding the feature
  double cmi = 0.0;  // I(S - S'; y | S') after adding the feature
  StopDecision decision;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  std::string stop_reason;
  double total_mi = 0.0;
  /// Candidate that was evaluated and rejected, when a criterion stopped.
  std::optional<std::size_t> rejected_feature;
  std::optional<StopDecision> final_decision;

  std::vector<std::size_t> selected() const;
};

/// Evaluates one criterion for a candidate against a state.
StopDecision evaluate_criterion(const SelectionState &state, std::size_t cand,
                                const SelectionConfig &config, const DiscretizedView *discretized);

/// Runs the greedy loop on a prepared state (consumed).
SelectionTrace greedy_select(SelectionState state, const SelectionConfig &config,
                             std::span<const std::string> feature_names,
                             const DiscretizedView *discretized = nullptr);

/// Standardizes, builds Grams and runs the greedy loop.
SelectionTrace greedy_select(const Dataset &d, const SelectionConfig &config);

}  // namespace renyi_fs
