#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "renyi_fs/error.hpp"

namespace renyi_fs {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Normalized positive-definite Gram matrix: symmetric, entries in [0, 1/n],
/// diagonal exactly 1/n, trace 1.
///
/// Stored at unit-diagonal ("kernel") scale so that Hadamard products of many
/// Grams never underflow; entries() applies the 1/n factor lazily.
template <typename Scalar>
class GramMatrix {
 public:
  using Matrix = MatrixX<Scalar>;

  GramMatrix() = default;

  /// Takes a raw kernel matrix K and normalizes it to K_ij / sqrt(K_ii K_jj).
  static GramMatrix from_kernel(Matrix k) {
    if (k.rows() != k.cols()) throw Error(ErrorCode::DimensionMismatch, "kernel matrix must be square");
    const VectorX<Scalar> d = k.diagonal().cwiseSqrt().cwiseInverse();
    k = d.asDiagonal() * k * d.asDiagonal();
    k.diagonal().setOnes();
    return GramMatrix(std::move(k));
  }

  /// Wraps a matrix that is already unit-diagonal (no rescaling).
  static GramMatrix from_unit_diagonal(Matrix k) { return GramMatrix(std::move(k)); }

  /// Constant-kernel Gram (all entries 1/n): the identity of the normalized
  /// Hadamard product and the Gram of an empty variable set.
  static GramMatrix constant(Eigen::Index n) { return GramMatrix(Matrix::Ones(n, n)); }

  Eigen::Index size() const { return kernel_.rows(); }

  auto entries() const { return kernel_ / static_cast<Scalar>(kernel_.rows()); }
  const Matrix &unit_diagonal() const { return kernel_; }

 private:
  explicit GramMatrix(Matrix k) : kernel_(std::move(k)) {}

  Matrix kernel_;
};

using Gram = GramMatrix<double>;

/// Median of the pairwise absolute differences; 1 when that median is 0.
template <typename Derived>
typename Derived::Scalar median_bandwidth(const Eigen::MatrixBase<Derived> &column) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = column.size();
  std::vector<Scalar> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) dist.push_back(std::abs(column(i) - column(j)));
  if (dist.empty()) return Scalar(1);
  const std::size_t m = dist.size();
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  Scalar median = *mid;
  if (m % 2 == 0) median = (median + *std::max_element(dist.begin(), mid)) / Scalar(2);
  return median > Scalar(0) ? median : Scalar(1);
}

/// Gaussian kernel exp(-(a-b)^2 / (2 sigma^2)) on one scalar feature.
template <typename Derived>
GramMatrix<typename Derived::Scalar> gram_gaussian(const Eigen::MatrixBase<Derived> &column,
                                                   typename Derived::Scalar sigma) {
  using Scalar = typename Derived::Scalar;
  if (!(sigma > Scalar(0)) || !std::isfinite(sigma))
    throw Error(ErrorCode::NonPositiveBandwidth, "sigma must be positive and finite");
  const Eigen::Index n = column.size();
  if (n < 1) throw Error(ErrorCode::EmptyDataset, "empty column");
  const Scalar scale = Scalar(-1) / (Scalar(2) * sigma * sigma);
  MatrixX<Scalar> k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = Scalar(1);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const Scalar d = column(i) - column(j);
      k(i, j) = k(j, i) = std::exp(scale * d * d);
    }
  }
  return GramMatrix<Scalar>::from_unit_diagonal(std::move(k));
}

/// Delta kernel on categorical codes: 1 on equal labels, 0 otherwise.
template <typename Scalar = double, typename Labels>
GramMatrix<Scalar> gram_delta(const Labels &labels) {
  const auto n = static_cast<Eigen::Index>(std::size(labels));
  if (n < 1) throw Error(ErrorCode::EmptyDataset, "empty label vector");
  MatrixX<Scalar> k(n, n);
  auto it_j = std::begin(labels);
  for (Eigen::Index j = 0; j < n; ++j, ++it_j) {
    auto it_i = std::begin(labels);
    for (Eigen::Index i = 0; i < n; ++i, ++it_i) k(i, j) = (*it_i == *it_j) ? Scalar(1) : Scalar(0);
  }
  return GramMatrix<Scalar>::from_unit_diagonal(std::move(k));
}

/// Normalized Hadamard product of two Grams.
template <typename Scalar>
GramMatrix<Scalar> hadamard(const GramMatrix<Scalar> &a, const GramMatrix<Scalar> &b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "Gram dimensions differ in Hadamard product");
  return GramMatrix<Scalar>::from_unit_diagonal(a.unit_diagonal().cwiseProduct(b.unit_diagonal()));
}

/// (A_1 o ... o A_k) / tr(A_1 o ... o A_k). A single input is returned as is.
template <typename Scalar>
GramMatrix<Scalar> hadamard_normalized(std::span<const GramMatrix<Scalar>> grams) {
  if (grams.empty()) throw Error(ErrorCode::EmptyInput, "no Gram matrices to combine");
  MatrixX<Scalar> acc = grams.front().unit_diagonal();
  for (const auto &g : grams.subspan(1)) {
    if (g.size() != acc.rows())
      throw Error(ErrorCode::DimensionMismatch, "Gram dimensions differ in Hadamard product");
    acc.array() *= g.unit_diagonal().array();
  }
  return GramMatrix<Scalar>::from_unit_diagonal(std::move(acc));
}

template <typename Scalar>
GramMatrix<Scalar> hadamard_normalized(const std::vector<GramMatrix<Scalar>> &grams) {
  return hadamard_normalized(std::span<const GramMatrix<Scalar>>(grams));
}

/// Gram of the same variable after permuting its samples: entry (i, j) of the
/// result is entry (perm[i], perm[j]) of the input, which equals rebuilding the
/// kernel on the permuted column.
template <typename Scalar, typename Index>
GramMatrix<Scalar> permuted(const GramMatrix<Scalar> &g, const std::vector<Index> &perm) {
  if (static_cast<Eigen::Index>(perm.size()) != g.size())
    throw Error(ErrorCode::DimensionMismatch, "permutation length differs from Gram size");
  return GramMatrix<Scalar>::from_unit_diagonal(g.unit_diagonal()(perm, perm));
}

}  // namespace renyi_fs
