#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace renyi_fs {

/// Column-oriented numeric feature table with a dense-coded categorical label.
///
/// Features are stored n x F (one Eigen column per feature). Labels are codes
/// 0..C-1 and every code occurs at least once. The constructor validates all
/// invariants and throws Error on violation, so a Dataset value is always
/// well-formed.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd features, std::vector<int> labels,
          std::vector<std::string> feature_names,
          std::vector<std::string> label_names = {},
          std::string label_column_name = "label");

  Eigen::Index n() const { return features_.rows(); }
  Eigen::Index num_features() const { return features_.cols(); }
  int num_classes() const { return static_cast<int>(label_names_.size()); }

  const Eigen::MatrixXd &features() const { return features_; }
  auto column(Eigen::Index j) const { return features_.col(j); }
  const std::vector<int> &labels() const { return labels_; }
  const std::vector<std::string> &feature_names() const { return feature_names_; }
  const std::vector<std::string> &label_names() const { return label_names_; }
  const std::string &label_column_name() const { return label_column_name_; }

  /// Rows in the given order. Every class must remain represented.
  Dataset select_rows(std::span<const Eigen::Index> rows) const;
  Dataset select_columns(std::span<const Eigen::Index> cols) const;
  Dataset with_features(Eigen::MatrixXd features) const;

  friend bool operator==(const Dataset &a, const Dataset &b);

 private:
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> label_names_;
  std::string label_column_name_;
};

/// Integer-coded view used only by the chi-square baseline.
struct DiscretizedView {
  std::vector<std::vector<int>> columns;
  std::vector<int> cardinalities;
  std::vector<int> labels;
  int label_cardinality = 0;
};

/// Label column selector: a header name or a 0-based index. Empty means the
/// last column.
using LabelColumn = std::optional<std::variant<std::string, std::size_t>>;

/// Parses a CLI-style label argument: a header name wins, otherwise a
/// non-negative integer is taken as an index.
LabelColumn parse_label_column(const std::string &arg);

Dataset load_csv(const std::filesystem::path &path, const LabelColumn &label = {});
void save_csv(const Dataset &d, const std::filesystem::path &path);

/// Z-scores every feature column with population statistics. Constant columns
/// become all zeros.
Dataset standardize(const Dataset &d);

/// Quantile binning; values equal to a cut point fall into the lower bin and
/// codes are compacted so every code in [0, cardinality) is used.
DiscretizedView discretize_equal_frequency(const Dataset &d, int bins);

/// Stratified subsample of at most max_samples rows (rows keep file order).
/// Quotas use largest-remainder rounding with at least one row per class.
Dataset subsample(const Dataset &d, Eigen::Index max_samples, std::uint64_t seed);

}  // namespace renyi_fs
