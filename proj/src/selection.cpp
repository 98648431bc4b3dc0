#include "renyi_fs/selection.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "renyi_fs/error.hpp"
#include "renyi_fs/parallel.hpp"
#include "renyi_fs/random.hpp"

namespace renyi_fs {

namespace {

double entropy_of(const Gram &g, Alpha alpha) { return renyi_entropy(eigenspectrum(g), alpha); }

void require_remaining(const SelectionState &state, std::size_t cand) {
  if (!state.is_remaining(cand))
    throw Error(ErrorCode::InvalidConfig, "feature " + std::to_string(cand) + " is not a remaining candidate");
}

void require_permutations(int permutations) {
  if (permutations < 1)
    throw Error(ErrorCode::InvalidPermutationCount, "P must be >= 1, got " + std::to_string(permutations));
}

// Product of the single Grams of every feature except `skip`.
Gram product_without(const SelectionState &state, std::size_t skip) {
  Gram acc = Gram::constant(state.n());
  for (std::size_t j = 0; j < state.num_features(); ++j)
    if (j != skip) acc = hadamard(acc, state.single_grams()[j]);
  return acc;
}

Gram permuted_candidate(const SelectionState &state, std::size_t cand, std::uint64_t seed, int i) {
  Rng rng = keyed_rng({seed, static_cast<std::uint64_t>(state.selected().size()), static_cast<std::uint64_t>(i)});
  const auto perm = random_permutation(rng, static_cast<std::size_t>(state.n()));
  return permuted(state.single_grams()[cand], perm);
}

}  // namespace

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::CmiHeuristic: return "cmi-heuristic";
    case Criterion::CmiPermutation: return "cmi-permutation";
    case Criterion::MiPermutation: return "mi-permutation";
    case Criterion::DeltaMiChi2: return "dmi-chi2";
    case Criterion::None: return "none";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  for (Criterion c : {Criterion::CmiHeuristic, Criterion::CmiPermutation, Criterion::MiPermutation,
                      Criterion::DeltaMiChi2, Criterion::None})
    if (to_string(c) == name) return c;
  throw Error(ErrorCode::InvalidConfig, "unknown criterion '" + std::string(name) + "'");
}

std::string_view to_string(Decision d) { return d == Decision::Stop ? "stop" : "continue"; }

void SelectionConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorCode::InvalidConfig, "theta must lie strictly between 0 and 1");
  if ((criterion == Criterion::CmiPermutation || criterion == Criterion::MiPermutation) && permutations < 1)
    throw Error(ErrorCode::InvalidPermutationCount, "P must be >= 1");
  if (criterion == Criterion::DeltaMiChi2 && chi2_bins < 1)
    throw Error(ErrorCode::InvalidConfig, "chi2 bins must be >= 1");
  if (std::isnan(epsilon)) throw Error(ErrorCode::InvalidConfig, "epsilon is NaN");
}

// ---------------------------------------------------------------------------
// SelectionState

SelectionState::SelectionState(std::vector<Gram> single_grams, Gram label_gram, Alpha alpha)
    : alpha_(alpha), single_grams_(std::move(single_grams)), label_gram_(std::move(label_gram)) {
  const Eigen::Index n = label_gram_.size();
  for (const auto &g : single_grams_)
    if (g.size() != n) throw Error(ErrorCode::DimensionMismatch, "feature Gram size differs from label Gram");

  full_gram_ = Gram::constant(n);
  for (const auto &g : single_grams_) full_gram_ = hadamard(full_gram_, g);
  selected_gram_ = Gram::constant(n);
  selected_label_gram_ = label_gram_;
  for (std::size_t j = 0; j < single_grams_.size(); ++j) remaining_.push_back(j);

  label_entropy_ = entropy_of(label_gram_, alpha_);
  full_joint_ = entropy_of(full_gram_, alpha_);
  full_label_joint_ = entropy_of(hadamard(full_gram_, label_gram_), alpha_);
  total_mi_ = label_entropy_ + full_joint_ - full_label_joint_;
  selected_joint_ = 0.0;
  selected_label_joint_ = label_entropy_;
}

SelectionState SelectionState::from_dataset(const Dataset &standardized, Alpha alpha) {
  std::vector<Gram> grams(static_cast<std::size_t>(standardized.num_features()));
  parallel_for(grams.size(), [&](std::size_t j) {
    const auto col = standardized.column(static_cast<Eigen::Index>(j));
    grams[j] = gram_gaussian(col, median_bandwidth(col));
  });
  return SelectionState(std::move(grams), gram_delta(standardized.labels()), alpha);
}

bool SelectionState::is_remaining(std::size_t x) const {
  return std::binary_search(remaining_.begin(), remaining_.end(), x);
}

double SelectionState::selected_mi() const {
  if (selected_.empty()) return 0.0;
  return label_entropy_ + selected_joint_ - selected_label_joint_;
}

double SelectionState::residual_cmi() const {
  return full_joint_ + selected_label_joint_ - full_label_joint_ - selected_joint_;
}

double SelectionState::candidate_mi(std::size_t x) const {
  const Gram &g = single_grams_.at(x);
  return label_entropy_ + entropy_of(hadamard(selected_gram_, g), alpha_) -
         entropy_of(hadamard(selected_label_gram_, g), alpha_);
}

void SelectionState::commit(std::size_t x) {
  auto it = std::lower_bound(remaining_.begin(), remaining_.end(), x);
  if (it == remaining_.end() || *it != x)
    throw Error(ErrorCode::InvalidConfig, "feature " + std::to_string(x) + " is not remaining");
  remaining_.erase(it);
  selected_.push_back(x);
  selected_gram_ = hadamard(selected_gram_, single_grams_[x]);
  selected_label_gram_ = hadamard(selected_label_gram_, single_grams_[x]);
  selected_joint_ = entropy_of(selected_gram_, alpha_);
  selected_label_joint_ = entropy_of(selected_label_gram_, alpha_);
}

// ---------------------------------------------------------------------------
// Candidate search

std::vector<double> score_candidates(const SelectionState &state) {
  const auto &rem = state.remaining();
  std::vector<double> scores(rem.size());
  parallel_for(rem.size(), [&](std::size_t k) { scores[k] = state.candidate_mi(rem[k]); });
  return scores;
}

std::size_t best_candidate(const SelectionState &state) {
  if (state.remaining().empty()) throw Error(ErrorCode::NoRemainingFeatures, "no candidates left");
  const auto scores = score_candidates(state);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = k;
  return state.remaining()[best];
}

// ---------------------------------------------------------------------------
// Decision rules

StopDecision cmi_heuristic_decision(double statistic, double epsilon) {
  StopDecision d;
  d.statistic = statistic;
  d.threshold = epsilon;
  d.decision = statistic <= epsilon ? Decision::Stop : Decision::Continue;
  return d;
}

StopDecision cmi_permutation_decision(int count, int permutations, double theta) {
  require_permutations(permutations);
  const int allowed = static_cast<int>(std::floor((1.0 - theta) * permutations + 1e-9));
  StopDecision d;
  d.statistic = static_cast<double>(count) / permutations;
  d.threshold = static_cast<double>(allowed) / permutations;
  d.decision = count <= allowed ? Decision::Continue : Decision::Stop;
  d.detail.exceedances = count;
  d.detail.permutations = permutations;
  return d;
}

StopDecision mi_permutation_decision(int exceed, int permutations, double theta) {
  require_permutations(permutations);
  const int required = static_cast<int>(std::ceil(theta * permutations - 1e-9));
  StopDecision d;
  d.statistic = static_cast<double>(exceed) / permutations;
  d.threshold = static_cast<double>(required) / permutations;
  d.decision = exceed >= required ? Decision::Continue : Decision::Stop;
  d.detail.exceedances = exceed;
  d.detail.permutations = permutations;
  return d;
}

// ---------------------------------------------------------------------------
// Criteria

StopDecision criterion_cmi_heuristic(const SelectionState &state, std::size_t cand, double epsilon) {
  require_remaining(state, cand);
  if (state.remaining().size() == 1) {
    // Nothing would remain, so the residual is exactly zero.
    StopDecision d = cmi_heuristic_decision(0.0, epsilon);
    d.detail.note = "no features left to condition on";
    return d;
  }
  // I(S - S' - c; y | S' + c) = I(S; y) - I(S' + c; y); the shared joint terms cancel.
  return cmi_heuristic_decision(state.total_mi() - state.candidate_mi(cand), epsilon);
}

StopDecision criterion_cmi_permutation(const SelectionState &state, std::size_t cand,
                                       int permutations, double theta, std::uint64_t seed) {
  require_permutations(permutations);
  require_remaining(state, cand);
  if (state.remaining().size() == 1) {
    StopDecision d = cmi_permutation_decision(permutations, permutations, theta);
    d.statistic = 1.0;
    d.detail.note = "no features left to condition on";
    return d;
  }
  const Alpha alpha = state.alpha();
  const double observed = state.total_mi() - state.candidate_mi(cand);

  // With x~ in place of the candidate: A = S' + x~, C = S - S' - cand.
  const Gram rest = product_without(state, cand);  // S' + C
  const Gram rest_label = hadamard(rest, state.label_gram());
  const Gram &sel = state.cached_selected_gram();
  const Gram &sel_label = state.cached_selected_label_gram();

  std::vector<double> null_cmi(static_cast<std::size_t>(permutations));
  parallel_for(null_cmi.size(), [&](std::size_t i) {
    const Gram shuffled = permuted_candidate(state, cand, seed, static_cast<int>(i));
    const double j_ac = entropy_of(hadamard(rest, shuffled), alpha);
    const double j_ba = entropy_of(hadamard(sel_label, shuffled), alpha);
    const double j_abc = entropy_of(hadamard(rest_label, shuffled), alpha);
    const double j_a = entropy_of(hadamard(sel, shuffled), alpha);
    null_cmi[i] = j_ac + j_ba - j_abc - j_a;
  });
  const auto count =
      static_cast<int>(std::count_if(null_cmi.begin(), null_cmi.end(), [&](double v) { return observed >= v; }));
  StopDecision d = cmi_permutation_decision(count, permutations, theta);
  d.detail.observed = observed;
  return d;
}

StopDecision criterion_mi_permutation(const SelectionState &state, std::size_t cand,
                                      int permutations, double theta, std::uint64_t seed) {
  require_permutations(permutations);
  require_remaining(state, cand);
  const Alpha alpha = state.alpha();
  const double observed = state.candidate_mi(cand);
  const Gram &sel = state.cached_selected_gram();
  const Gram &sel_label = state.cached_selected_label_gram();

  std::vector<double> null_mi(static_cast<std::size_t>(permutations));
  parallel_for(null_mi.size(), [&](std::size_t i) {
    const Gram shuffled = permuted_candidate(state, cand, seed, static_cast<int>(i));
    null_mi[i] = state.label_entropy() + entropy_of(hadamard(sel, shuffled), alpha) -
                 entropy_of(hadamard(sel_label, shuffled), alpha);
  });
  const auto exceed =
      static_cast<int>(std::count_if(null_mi.begin(), null_mi.end(), [&](double v) { return observed > v; }));
  StopDecision d = mi_permutation_decision(exceed, permutations, theta);
  d.detail.observed = observed;
  return d;
}

double chi2_quantile(double df, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidProbability, "p must lie in (0, 1)");
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidConfig, "df must be positive");
  // P(chi2_df <= x) = P(df/2, x/2), the regularized lower incomplete gamma.
  return 2.0 * boost::math::gamma_p_inv(df / 2.0, p);
}

double plugin_conditional_mi(std::span<const int> x, int x_card, std::span<const int> y, int y_card,
                             std::span<const int> z, int z_card) {
  const std::size_t n = x.size();
  if (y.size() != n || z.size() != n) throw Error(ErrorCode::LengthMismatch, "contingency inputs differ in length");
  if (n == 0) return 0.0;
  const auto xc = static_cast<std::size_t>(x_card), yc = static_cast<std::size_t>(y_card);
  const auto zc = static_cast<std::size_t>(z_card);
  std::vector<double> n_xyz(xc * yc * zc, 0.0), n_xz(xc * zc, 0.0), n_yz(yc * zc, 0.0), n_z(zc, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<std::size_t>(x[i]), b = static_cast<std::size_t>(y[i]);
    const auto c = static_cast<std::size_t>(z[i]);
    n_xyz[(c * xc + a) * yc + b] += 1.0;
    n_xz[c * xc + a] += 1.0;
    n_yz[c * yc + b] += 1.0;
    n_z[c] += 1.0;
  }
  double mi = 0.0;
  for (std::size_t c = 0; c < zc; ++c)
    for (std::size_t a = 0; a < xc; ++a)
      for (std::size_t b = 0; b < yc; ++b) {
        const double k = n_xyz[(c * xc + a) * yc + b];
        if (k > 0.0) mi += k * std::log(k * n_z[c] / (n_xz[c * xc + a] * n_yz[c * yc + b]));
      }
  return std::max(0.0, mi / static_cast<double>(n));
}

StopDecision criterion_delta_mi_chi2(const SelectionState &state, std::size_t cand,
                                     const DiscretizedView &discretized, double theta) {
  require_remaining(state, cand);
  const auto n = static_cast<std::size_t>(state.n());
  StopDecision d;

  // Mixed-radix cell code over the selected columns.
  std::vector<int> cell(n, 0);
  double cells = 1.0;
  for (std::size_t s : state.selected()) {
    const int card = discretized.cardinalities[s];
    cells *= card;
    if (cells > static_cast<double>(n)) {
      d.decision = Decision::Stop;
      d.detail.note = "chi2-cells-exhausted";
      return d;
    }
    for (std::size_t i = 0; i < n; ++i) cell[i] = cell[i] * card + discretized.columns[s][i];
  }

  const int c_x = discretized.cardinalities[cand];
  const int c_y = discretized.label_cardinality;
  const double df = static_cast<double>(c_x - 1) * static_cast<double>(c_y - 1) * cells;
  const double cmi = plugin_conditional_mi(discretized.columns[cand], c_x, discretized.labels, c_y, cell,
                                           static_cast<int>(cells));
  d.statistic = 2.0 * static_cast<double>(n) * cmi;
  d.detail.degrees_of_freedom = df;
  if (df <= 0.0) {
    // A constant candidate or a single class cannot carry information.
    d.decision = Decision::Stop;
    d.detail.note = "zero degrees of freedom";
    return d;
  }
  d.threshold = chi2_quantile(df, theta);
  d.decision = d.statistic < d.threshold ? Decision::Stop : Decision::Continue;
  return d;
}

// ---------------------------------------------------------------------------
// Greedy loop

std::vector<std::size_t> SelectionTrace::selected() const {
  std::vector<std::size_t> out;
  for (const auto &s : steps) out.push_back(s.feature);
  return out;
}

StopDecision evaluate_criterion(const SelectionState &state, std::size_t cand,
                                const SelectionConfig &config, const DiscretizedView *discretized) {
  switch (config.criterion) {
    case Criterion::CmiHeuristic:
      return criterion_cmi_heuristic(state, cand, config.epsilon);
    case Criterion::CmiPermutation:
      return criterion_cmi_permutation(state, cand, config.permutations, config.theta, config.seed);
    case Criterion::MiPermutation:
      return criterion_mi_permutation(state, cand, config.permutations, config.theta, config.seed);
    case Criterion::DeltaMiChi2:
      if (!discretized) throw Error(ErrorCode::InvalidConfig, "dmi-chi2 needs a discretized view");
      return criterion_delta_mi_chi2(state, cand, *discretized, config.theta);
    case Criterion::None:
      break;
  }
  StopDecision d;
  d.statistic = state.total_mi() - state.candidate_mi(cand);
  d.detail.note = "no stopping rule";
  return d;
}

SelectionTrace greedy_select(SelectionState state, const SelectionConfig &config,
                             std::span<const std::string> feature_names,
                             const DiscretizedView *discretized) {
  config.validate();
  if (state.num_features() == 0) throw Error(ErrorCode::NoRemainingFeatures, "dataset has no features");
  const std::size_t cap = config.max_features.value_or(state.num_features());

  SelectionTrace trace;
  trace.total_mi = state.total_mi();
  for (;;) {
    if (state.remaining().empty()) {
      trace.stop_reason = "exhausted";
      break;
    }
    if (state.selected().size() >= cap) {
      trace.stop_reason = "max-features";
      break;
    }
    const std::size_t cand = best_candidate(state);
    StopDecision decision = evaluate_criterion(state, cand, config, discretized);
    if (decision.decision == Decision::Stop) {
      trace.stop_reason =
          decision.detail.note == "chi2-cells-exhausted" ? decision.detail.note : std::string(to_string(config.criterion));
      trace.rejected_feature = cand;
      trace.final_decision = std::move(decision);
      break;
    }
    state.commit(cand);
    SelectionStep step;
    step.feature = cand;
    step.name = cand < feature_names.size() ? feature_names[cand] : "x" + std::to_string(cand);
    step.mi = state.selected_mi();
    step.cmi = state.residual_cmi();
    step.decision = std::move(decision);
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

SelectionTrace greedy_select(const Dataset &d, const SelectionConfig &config) {
  config.validate();
  const Dataset z = standardize(d);
  std::optional<DiscretizedView> view;
  if (config.criterion == Criterion::DeltaMiChi2) view = discretize_equal_frequency(d, config.chi2_bins);
  return greedy_select(SelectionState::from_dataset(z, config.alpha), config, z.feature_names(),
                       view ? &*view : nullptr);
}

}  // namespace renyi_fs
