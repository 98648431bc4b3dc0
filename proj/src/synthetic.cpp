#include "renyi_fs/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "renyi_fs/error.hpp"
#include "renyi_fs/random.hpp"

namespace renyi_fs {

namespace {

std::vector<std::string> numbered(const char *prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < count; ++j) names.push_back(prefix + std::to_string(j));
  return names;
}

// Triangular wave of height 6 peaking at `peak` (1-based positions 1..21).
double triangle(int position, int peak) { return std::max(0.0, 6.0 - std::abs(position - peak)); }

}  // namespace

Dataset make_linear_synthetic(Eigen::Index n, int informative, int noise, std::uint64_t seed) {
  if (n < 2 || informative < 1 || noise < 0) throw Error(ErrorCode::InvalidConfig, "bad synthetic generator sizes");
  Rng rng = keyed_rng({seed, 0x5157ULL});
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index f = informative + noise;
  // Resample until both classes appear so the Dataset invariants hold.
  for (;;) {
    Eigen::MatrixXd x(n, f);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      double drive = 0.0;
      for (Eigen::Index j = 0; j < f; ++j) {
        x(i, j) = normal(rng);
        if (j < informative) drive += x(i, j);
      }
      y[static_cast<std::size_t>(i)] = drive + 0.5 * normal(rng) > 0.0 ? 1 : 0;
    }
    if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) continue;
    return Dataset(std::move(x), std::move(y), numbered("x", f), {"0", "1"}, "y");
  }
}

Dataset make_waveform(Eigen::Index n, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorCode::InvalidConfig, "waveform needs at least three samples");
  constexpr int kFeatures = 21;
  constexpr std::array<int, 3> kPeaks{11, 15, 7};
  // Class c mixes waves (0,1), (0,2) and (1,2) respectively.
  constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

  Rng rng = keyed_rng({seed, 0x3a7eULL});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd x(n, kFeatures);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    // Cycle the class for the first three rows so every class is present.
    const int c = i < 3 ? static_cast<int>(i) : static_cast<int>(uniform_index(rng, 3));
    const double u = unit(rng);
    const auto [a, b] = kPairs[static_cast<std::size_t>(c)];
    for (int m = 0; m < kFeatures; ++m)
      x(i, m) = u * triangle(m + 1, kPeaks[static_cast<std::size_t>(a)]) +
                (1.0 - u) * triangle(m + 1, kPeaks[static_cast<std::size_t>(b)]) + normal(rng);
    y[static_cast<std::size_t>(i)] = c;
  }
  return Dataset(std::move(x), std::move(y), numbered("w", kFeatures), {"0", "1", "2"}, "class");
}

}  // namespace renyi_fs
