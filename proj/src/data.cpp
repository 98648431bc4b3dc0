#include "renyi_fs/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "renyi_fs/error.hpp"
#include "renyi_fs/random.hpp"

namespace renyi_fs {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  s = s.substr(b, e - b);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_row(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      return out;
    }
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_double(const std::string &cell, double &value) {
  if (cell.empty()) return false;
  const char *first = cell.data();
  const char *last = first + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && std::isfinite(value);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd features, std::vector<int> labels,
                 std::vector<std::string> feature_names,
                 std::vector<std::string> label_names, std::string label_column_name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      label_names_(std::move(label_names)),
      label_column_name_(std::move(label_column_name)) {
  if (features_.rows() < 1) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  if (static_cast<Eigen::Index>(labels_.size()) != features_.rows())
    throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
  if (feature_names_.empty()) {
    for (Eigen::Index j = 0; j < features_.cols(); ++j)
      feature_names_.push_back("x" + std::to_string(j));
  }
  if (static_cast<Eigen::Index>(feature_names_.size()) != features_.cols())
    throw Error(ErrorCode::DimensionMismatch, "feature name count differs from column count");
  if (!features_.allFinite())
    throw Error(ErrorCode::ParseError, "feature values must be finite");

  const int max_code = *std::max_element(labels_.begin(), labels_.end());
  if (*std::min_element(labels_.begin(), labels_.end()) < 0)
    throw Error(ErrorCode::InvalidConfig, "label codes must be non-negative");
  if (label_names_.empty()) {
    for (int c = 0; c <= max_code; ++c) label_names_.push_back(std::to_string(c));
  }
  std::vector<bool> seen(label_names_.size(), false);
  for (int y : labels_) {
    if (y >= static_cast<int>(label_names_.size()))
      throw Error(ErrorCode::InvalidConfig, "label code without a name");
    seen[y] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorCode::InvalidConfig, "every class must occur at least once");
}

Dataset Dataset::select_rows(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f.row(static_cast<Eigen::Index>(i)) = features_.row(rows[i]);
    y[i] = labels_[static_cast<std::size_t>(rows[i])];
  }
  return Dataset(std::move(f), std::move(y), feature_names_, label_names_, label_column_name_);
}

Dataset Dataset::select_columns(std::span<const Eigen::Index> cols) const {
  Eigen::MatrixXd f(features_.rows(), static_cast<Eigen::Index>(cols.size()));
  std::vector<std::string> names;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    f.col(static_cast<Eigen::Index>(j)) = features_.col(cols[j]);
    names.push_back(feature_names_[static_cast<std::size_t>(cols[j])]);
  }
  return Dataset(std::move(f), labels_, std::move(names), label_names_, label_column_name_);
}

Dataset Dataset::with_features(Eigen::MatrixXd features) const {
  return Dataset(std::move(features), labels_, feature_names_, label_names_, label_column_name_);
}

bool operator==(const Dataset &a, const Dataset &b) {
  return a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
         a.features_ == b.features_ && a.labels_ == b.labels_ &&
         a.feature_names_ == b.feature_names_ && a.label_names_ == b.label_names_;
}

LabelColumn parse_label_column(const std::string &arg) {
  if (arg.empty()) return std::nullopt;
  // Kept as text: load_csv matches header names first, then integer indices.
  return LabelColumn(std::in_place, std::in_place_index<0>, arg);
}

Dataset load_csv(const std::filesystem::path &path, const LabelColumn &label) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyDataset, "no header in " + path.string());
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_row(line);

  std::size_t label_col = header.size() - 1;
  if (label) {
    if (const auto *name = std::get_if<std::string>(&*label)) {
      auto it = std::find(header.begin(), header.end(), *name);
      if (it != header.end()) {
        label_col = static_cast<std::size_t>(it - header.begin());
      } else {
        std::size_t index = 0;
        auto [ptr, ec] = std::from_chars(name->data(), name->data() + name->size(), index);
        if (ec != std::errc() || ptr != name->data() + name->size() || index >= header.size())
          throw Error(ErrorCode::MissingLabelColumn, *name);
        label_col = index;
      }
    } else {
      label_col = std::get<std::size_t>(*label);
      if (label_col >= header.size())
        throw Error(ErrorCode::MissingLabelColumn, "index " + std::to_string(label_col));
    }
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_col) names.push_back(header[c]);

  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::string> label_names;
  std::unordered_map<std::string, int> codes;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_row(line);
    if (cells.size() != header.size())
      throw ParseError(row, std::min(cells.size(), header.size()),
                       "expected " + std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) {
        if (cells[c].empty()) throw ParseError(row, c, "missing label");
        auto [it, inserted] = codes.emplace(cells[c], static_cast<int>(label_names.size()));
        if (inserted) label_names.push_back(cells[c]);
        labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      if (!parse_double(cells[c], v)) throw ParseError(row, c, "not a finite number: '" + cells[c] + "'");
      values.push_back(v);
    }
  }
  if (row == 0) throw Error(ErrorCode::EmptyDataset, "no data rows in " + path.string());

  const auto n = static_cast<Eigen::Index>(row);
  const auto f = static_cast<Eigen::Index>(names.size());
  // values is row-major.
  Eigen::MatrixXd features =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          values.data(), n, f);
  return Dataset(std::move(features), std::move(labels), std::move(names), std::move(label_names),
                 header[label_col]);
}

void save_csv(const Dataset &d, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  for (const auto &name : d.feature_names()) out << name << ',';
  out << d.label_column_name() << '\n';
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (Eigen::Index j = 0; j < d.num_features(); ++j) out << format_double(d.features()(i, j)) << ',';
    out << d.label_names()[static_cast<std::size_t>(d.labels()[static_cast<std::size_t>(i)])] << '\n';
  }
}

Dataset standardize(const Dataset &d) {
  Eigen::MatrixXd z = d.features();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    auto col = z.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      col.setZero();
      continue;
    }
    col.array() -= col.mean();
    col /= std::sqrt(col.squaredNorm() / static_cast<double>(col.size()));
  }
  return d.with_features(std::move(z));
}

DiscretizedView discretize_equal_frequency(const Dataset &d, int bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidConfig, "bins must be >= 1");
  const auto n = static_cast<std::size_t>(d.n());
  DiscretizedView view;
  view.labels = d.labels();
  view.label_cardinality = d.num_classes();
  for (Eigen::Index j = 0; j < d.num_features(); ++j) {
    std::vector<double> sorted(d.column(j).data(), d.column(j).data() + n);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    for (int b = 1; b < bins; ++b) {
      // Last element of bin b: position ceil(b*n/bins) - 1.
      const std::size_t pos = (static_cast<std::size_t>(b) * n + static_cast<std::size_t>(bins) - 1) /
                                  static_cast<std::size_t>(bins) -
                              1;
      cuts.push_back(sorted[pos]);
    }
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<int> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = d.column(j)(static_cast<Eigen::Index>(i));
      raw[i] = static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
    }
    std::vector<int> used(cuts.size() + 1, -1);
    for (int c : raw) used[static_cast<std::size_t>(c)] = 1;
    int next = 0;
    for (int &u : used)
      if (u == 1) u = next++;
    for (int &c : raw) c = used[static_cast<std::size_t>(c)];
    view.columns.push_back(std::move(raw));
    view.cardinalities.push_back(next);
  }
  return view;
}

Dataset subsample(const Dataset &d, Eigen::Index max_samples, std::uint64_t seed) {
  const int classes = d.num_classes();
  if (max_samples < classes)
    throw Error(ErrorCode::MaxSamplesBelowClassCount,
                std::to_string(max_samples) + " < " + std::to_string(classes));
  if (d.n() <= max_samples) return d;

  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(classes));
  for (Eigen::Index i = 0; i < d.n(); ++i)
    members[static_cast<std::size_t>(d.labels()[static_cast<std::size_t>(i)])].push_back(i);

  // Largest-remainder apportionment, one row guaranteed per class.
  std::vector<Eigen::Index> quota(members.size());
  std::vector<std::pair<double, int>> remainders;
  Eigen::Index assigned = 0;
  for (int c = 0; c < classes; ++c) {
    const double exact = static_cast<double>(max_samples) *
                         static_cast<double>(members[static_cast<std::size_t>(c)].size()) /
                         static_cast<double>(d.n());
    quota[static_cast<std::size_t>(c)] = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(exact));
    assigned += quota[static_cast<std::size_t>(c)];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < max_samples; k = (k + 1) % remainders.size()) {
    const auto c = static_cast<std::size_t>(remainders[k].second);
    if (quota[c] < static_cast<Eigen::Index>(members[c].size())) {
      ++quota[c];
      ++assigned;
    }
  }
  while (assigned > max_samples) {
    // Only reachable when the one-per-class floor overshoots; trim the largest.
    auto it = std::max_element(quota.begin(), quota.end());
    --*it;
    --assigned;
  }

  std::vector<Eigen::Index> rows;
  for (int c = 0; c < classes; ++c) {
    auto &m = members[static_cast<std::size_t>(c)];
    Rng rng = keyed_rng({seed, static_cast<std::uint64_t>(c)});
    const auto perm = random_permutation(rng, m.size());
    for (Eigen::Index k = 0; k < quota[static_cast<std::size_t>(c)]; ++k)
      rows.push_back(m[perm[static_cast<std::size_t>(k)]]);
  }
  std::sort(rows.begin(), rows.end());
  return d.select_rows(rows);
}

}  // namespace renyi_fs
