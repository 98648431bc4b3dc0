#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "renyi_fs/data.hpp"

namespace renyi_fs {

struct TrainOptions {
  int epochs = 50;
  double regularization = 1e-3;
  std::uint64_t seed = 0;
};

/// One-vs-rest linear classifier. Column c of `weights` scores class c over
/// the standardized inputs; its last entry is the bias.
struct LinearModel {
  Eigen::MatrixXd weights;  // (d + 1) x C
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;
  /// Set when the training labels held a single class.
  std::optional<int> constant_class;

  int num_classes() const { return static_cast<int>(weights.cols()); }
  int predict_row(const Eigen::Ref<const Eigen::RowVectorXd> &x) const;
  std::vector<int> predict(const Eigen::Ref<const Eigen::MatrixXd> &x) const;
};

/// L2-regularized hinge loss minimized by Pegasos-style subgradient steps
/// (step 1 / (lambda t)), one binary problem per class. Inputs are
/// standardized with the training statistics, which the model keeps.
LinearModel train_linear(const Eigen::Ref<const Eigen::MatrixXd> &x, std::span<const int> y, int num_classes,
                         const TrainOptions &options = {});

double accuracy(const LinearModel &model, const Eigen::Ref<const Eigen::MatrixXd> &x, std::span<const int> y);

struct BootstrapResult {
  std::vector<double> run_accuracies;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_features = 0;
};

/// Out-of-bag accuracy of the linear model over `runs` bootstrap draws. Each
/// run uses its own stream keyed by (seed, run), so runs are independent of
/// evaluation order. A draw with an empty out-of-bag set is redrawn.
BootstrapResult bootstrap_accuracy(const Dataset &d, std::span<const Eigen::Index> feature_subset, int runs,
                                   std::uint64_t seed, const TrainOptions &options = {});

struct TestResult {
  double p_value = 1.0;
  bool reject = false;
};

/// Two-sided paired t-test. All-zero differences give p = 1.
TestResult paired_t_test(std::span<const double> a, std::span<const double> b, double significance);

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test. Exact null distribution
/// for small tie-free samples, otherwise the normal approximation with tie and
/// continuity corrections.
TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double significance);

/// Smallest subset size (1-based) whose bootstrap accuracies are not
/// significantly different from those of the best mean.
std::size_t optimal_feature_count(std::span<const BootstrapResult> curve, double significance);

/// Competition ranks ("1224") of criteria per dataset by |count - optimal|.
class RankTable {
 public:
  explicit RankTable(std::vector<std::string> criteria) : criteria_(std::move(criteria)) {}

  void add_dataset(std::string name, std::span<const std::size_t> counts, std::size_t optimal);

  const std::vector<std::string> &criteria() const { return criteria_; }
  const std::vector<std::string> &datasets() const { return datasets_; }
  /// ranks()[dataset][criterion]
  const std::vector<std::vector<int>> &ranks() const { return ranks_; }
  std::vector<double> rank_column(std::size_t criterion) const;
  std::vector<double> average_ranks() const;

 private:
  std::vector<std::string> criteria_;
  std::vector<std::string> datasets_;
  std::vector<std::vector<int>> ranks_;
};

RankTable rank_criteria(const std::vector<std::string> &criteria, std::span<const std::size_t> counts,
                        std::size_t optimal);

}  // namespace renyi_fs
