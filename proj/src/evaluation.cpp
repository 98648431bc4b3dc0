#include "renyi_fs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "renyi_fs/error.hpp"
#include "renyi_fs/parallel.hpp"
#include "renyi_fs/random.hpp"

namespace renyi_fs {

namespace {

constexpr double kZ95 = 1.96;
constexpr int kExactRankSumLimit = 8;

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Two-sided p-value of Student's t with `df` degrees of freedom:
// P(|T| >= t) = I_{df / (df + t^2)}(df / 2, 1 / 2).
double student_two_sided(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

// Midranks of the pooled sample; also returns sum over tie groups of t^3 - t.
std::vector<double> midranks(std::span<const double> pooled, double &tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

// Number of ways to reach each U = 0..n1*n2 under the no-ties null,
// counts[m][u] for m elements of sample one among the smallest positions.
double exact_rank_sum_p(std::size_t n1, std::size_t n2, double u) {
  // f(i, j, u): arrangements of i from sample one and j from sample two with
  // statistic u; f(i, j, u) = f(i - 1, j, u - j) + f(i, j - 1, u).
  const std::size_t umax = n1 * n2;
  std::vector<std::vector<double>> prev(n2 + 1, std::vector<double>(umax + 1, 0.0));
  for (std::size_t j = 0; j <= n2; ++j) prev[j][0] = 1.0;  // i = 0
  for (std::size_t i = 1; i <= n1; ++i) {
    std::vector<std::vector<double>> cur(n2 + 1, std::vector<double>(umax + 1, 0.0));
    cur[0][0] = 1.0;
    for (std::size_t j = 1; j <= n2; ++j)
      for (std::size_t v = 0; v <= umax; ++v) cur[j][v] = cur[j - 1][v] + (v >= j ? prev[j][v - j] : 0.0);
    prev = std::move(cur);
  }
  const auto &dist = prev[n2];
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  const double mean = static_cast<double>(umax) / 2.0;
  const double dev = std::abs(u - mean);
  double tail = 0.0;
  for (std::size_t v = 0; v <= umax; ++v)
    if (std::abs(static_cast<double>(v) - mean) >= dev - 1e-9) tail += dist[v];
  return std::min(1.0, tail / total);
}

BootstrapResult summarize(std::vector<double> accuracies, std::size_t n_features) {
  BootstrapResult r;
  const auto runs = static_cast<double>(accuracies.size());
  r.mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / runs;
  double ss = 0.0;
  for (double a : accuracies) ss += (a - r.mean) * (a - r.mean);
  const double sd = accuracies.size() > 1 ? std::sqrt(ss / (runs - 1.0)) : 0.0;
  const double half = kZ95 * sd / std::sqrt(runs);
  r.ci_low = r.mean - half;
  r.ci_high = r.mean + half;
  r.run_accuracies = std::move(accuracies);
  r.n_features = n_features;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear classifier

int LinearModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd> &x) const {
  if (constant_class) return *constant_class;
  const Eigen::Index d = weights.rows() - 1;
  const Eigen::RowVectorXd z = (x - mean).cwiseQuotient(scale);
  Eigen::Index best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < weights.cols(); ++c) {
    const double s = z.dot(weights.col(c).head(d)) + weights(d, c);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return static_cast<int>(best);
}

std::vector<int> LinearModel::predict(const Eigen::Ref<const Eigen::MatrixXd> &x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = predict_row(x.row(i));
  return out;
}

LinearModel train_linear(const Eigen::Ref<const Eigen::MatrixXd> &x, std::span<const int> y, int num_classes,
                         const TrainOptions &options) {
  const Eigen::Index m = x.rows();
  const Eigen::Index d = x.cols();
  if (m < 1) throw Error(ErrorCode::EmptyDataset, "no training samples");
  if (static_cast<Eigen::Index>(y.size()) != m) throw Error(ErrorCode::LengthMismatch, "labels and rows differ");
  if (!(options.regularization > 0.0)) throw Error(ErrorCode::InvalidConfig, "regularization must be positive");

  LinearModel model;
  model.weights = Eigen::MatrixXd::Zero(d + 1, num_classes);
  model.mean = x.colwise().mean();
  model.scale = ((x.rowwise() - model.mean).array().square().colwise().sum() / static_cast<double>(m)).sqrt();
  for (Eigen::Index j = 0; j < d; ++j)
    if (!(model.scale(j) > 0.0)) model.scale(j) = 1.0;

  if (std::all_of(y.begin(), y.end(), [&](int v) { return v == y[0]; })) {
    model.constant_class = y[0];
    return model;
  }

  // Augmented standardized design: last column is the constant bias input.
  Eigen::MatrixXd z(m, d + 1);
  z.leftCols(d) = (x.rowwise() - model.mean).array().rowwise() / model.scale.array();
  z.col(d).setOnes();

  const double lambda = options.regularization;
  const double radius = 1.0 / std::sqrt(lambda);
  for (int c = 0; c < num_classes; ++c) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      Rng rng = keyed_rng({options.seed, static_cast<std::uint64_t>(epoch)});
      for (std::size_t i : random_permutation(rng, static_cast<std::size_t>(m))) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double target = y[i] == c ? 1.0 : -1.0;
        const auto row = z.row(static_cast<Eigen::Index>(i));
        const double margin = target * row.dot(w);
        w *= 1.0 - eta * lambda;
        if (margin < 1.0) w += eta * target * row.transpose();
        const double norm = w.norm();
        if (norm > radius) w *= radius / norm;
      }
    }
    model.weights.col(c) = w;
  }
  return model;
}

double accuracy(const LinearModel &model, const Eigen::Ref<const Eigen::MatrixXd> &x, std::span<const int> y) {
  if (y.empty()) return 0.0;
  const auto pred = model.predict(x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += pred[i] == y[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

// ---------------------------------------------------------------------------
// Bootstrap

BootstrapResult bootstrap_accuracy(const Dataset &d, std::span<const Eigen::Index> feature_subset, int runs,
                                   std::uint64_t seed, const TrainOptions &options) {
  if (feature_subset.empty()) throw Error(ErrorCode::EmptyFeatureSubset, "no features to evaluate");
  if (runs < 1) throw Error(ErrorCode::InvalidConfig, "runs must be >= 1");
  const Eigen::Index n = d.n();
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(feature_subset.size()));
  for (std::size_t j = 0; j < feature_subset.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = d.column(feature_subset[j]);

  std::vector<double> acc(static_cast<std::size_t>(runs));
  parallel_for(acc.size(), [&](std::size_t r) {
    std::vector<Eigen::Index> train, test;
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng = keyed_rng({seed, static_cast<std::uint64_t>(r), attempt});
      std::vector<bool> in_bag(static_cast<std::size_t>(n), false);
      train.clear();
      for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        train.push_back(i);
        in_bag[static_cast<std::size_t>(i)] = true;
      }
      test.clear();
      for (Eigen::Index i = 0; i < n; ++i)
        if (!in_bag[static_cast<std::size_t>(i)]) test.push_back(i);
      if (!test.empty()) break;
    }
    const auto gather = [&](const std::vector<Eigen::Index> &rows, Eigen::MatrixXd &xs, std::vector<int> &ys) {
      xs.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
      ys.resize(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        xs.row(static_cast<Eigen::Index>(k)) = x.row(rows[k]);
        ys[k] = d.labels()[static_cast<std::size_t>(rows[k])];
      }
    };
    Eigen::MatrixXd x_train, x_test;
    std::vector<int> y_train, y_test;
    gather(train, x_train, y_train);
    gather(test, x_test, y_test);
    TrainOptions run_options = options;
    run_options.seed = splitmix64(options.seed ^ splitmix64(seed + r));
    const LinearModel model = train_linear(x_train, y_train, d.num_classes(), run_options);
    acc[r] = accuracy(model, x_test, y_test);
  });
  return summarize(std::move(acc), feature_subset.size());
}

// ---------------------------------------------------------------------------
// Hypothesis tests

TestResult paired_t_test(std::span<const double> a, std::span<const double> b, double significance) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  if (a.size() < 2) throw Error(ErrorCode::TooFewSamples, "paired t-test needs at least two pairs");
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
  TestResult r;
  if (ss == 0.0) {
    r.p_value = mean == 0.0 ? 1.0 : 0.0;
  } else {
    const double t = mean / std::sqrt(ss / (n - 1.0) / n);
    r.p_value = student_two_sided(t, n - 1.0);
  }
  r.reject = r.p_value < significance;
  return r;
}

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double significance) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "rank-sum test needs two non-empty samples");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const std::vector<double> ranks = midranks(pooled, tie_term);
  const auto n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  const double u = r1 - n1 * (n1 + 1.0) / 2.0;

  TestResult r;
  if (tie_term == 0.0 && a.size() <= kExactRankSumLimit && b.size() <= kExactRankSumLimit) {
    r.p_value = exact_rank_sum_p(a.size(), b.size(), u);
  } else {
    const double nn = n1 + n2;
    const double var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    const double dev = std::abs(u - n1 * n2 / 2.0);
    if (var <= 0.0) {
      r.p_value = 1.0;
    } else {
      r.p_value = std::min(1.0, normal_two_sided(std::max(0.0, dev - 0.5) / std::sqrt(var)));
    }
  }
  r.reject = r.p_value < significance;
  return r;
}

// ---------------------------------------------------------------------------
// Optimal count and ranking

std::size_t optimal_feature_count(std::span<const BootstrapResult> curve, double significance) {
  if (curve.empty()) throw Error(ErrorCode::EmptyInput, "empty accuracy curve");
  std::size_t best = 0;
  for (std::size_t k = 1; k < curve.size(); ++k)
    if (curve[k].mean > curve[best].mean) best = k;
  for (std::size_t k = 0; k < best; ++k) {
    const auto &cand = curve[k].run_accuracies;
    const auto &top = curve[best].run_accuracies;
    if (cand.size() != top.size()) throw Error(ErrorCode::LengthMismatch, "curve entries differ in run count");
    if (cand.size() < 2) {
      if (cand == top) return k + 1;
      continue;
    }
    if (!paired_t_test(cand, top, significance).reject) return k + 1;
  }
  return best + 1;
}

void RankTable::add_dataset(std::string name, std::span<const std::size_t> counts, std::size_t optimal) {
  if (counts.size() != criteria_.size()) throw Error(ErrorCode::LengthMismatch, "one count per criterion expected");
  std::vector<std::size_t> gap(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c)
    gap[c] = counts[c] > optimal ? counts[c] - optimal : optimal - counts[c];
  std::vector<int> ranks(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c)
    ranks[c] = 1 + static_cast<int>(std::count_if(gap.begin(), gap.end(), [&](std::size_t g) { return g < gap[c]; }));
  datasets_.push_back(std::move(name));
  ranks_.push_back(std::move(ranks));
}

std::vector<double> RankTable::rank_column(std::size_t criterion) const {
  std::vector<double> out;
  for (const auto &row : ranks_) out.push_back(row.at(criterion));
  return out;
}

std::vector<double> RankTable::average_ranks() const {
  std::vector<double> avg(criteria_.size(), 0.0);
  if (ranks_.empty()) return avg;
  for (const auto &row : ranks_)
    for (std::size_t c = 0; c < row.size(); ++c) avg[c] += row[c];
  for (double &v : avg) v /= static_cast<double>(ranks_.size());
  return avg;
}

RankTable rank_criteria(const std::vector<std::string> &criteria, std::span<const std::size_t> counts,
                        std::size_t optimal) {
  if (criteria.empty()) throw Error(ErrorCode::EmptyInput, "no criteria to rank");
  RankTable table(criteria);
  table.add_dataset("dataset", counts, optimal);
  return table;
}

}  // namespace renyi_fs
