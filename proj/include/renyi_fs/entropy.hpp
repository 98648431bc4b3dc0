#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "renyi_fs/error.hpp"
#include "renyi_fs/kernels.hpp"

namespace renyi_fs {

/// Order of the Renyi entropy: positive and bounded away from 1.
class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value) || std::abs(value - 1.0) < 1e-6)
      throw Error(ErrorCode::InvalidAlpha, "alpha must be positive and != 1, got " + std::to_string(value));
  }
  double value() const { return value_; }

 private:
  double value_;
};

/// Non-negative eigenvalues of a Gram matrix, non-increasing, summing to 1.
template <typename Scalar>
struct Eigenspectrum {
  VectorX<Scalar> values;
};

/// Eigenvalues within this distance below zero are treated as round-off.
template <typename Scalar>
constexpr Scalar negative_eigenvalue_tolerance() {
  return std::max(Scalar(1e-8), Scalar(64) * std::numeric_limits<Scalar>::epsilon());
}

template <typename Scalar>
Eigenspectrum<Scalar> eigenspectrum(const GramMatrix<Scalar> &a) {
  using Solver = Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>>;
  const Eigen::Index n = a.size();
  Solver solver(a.entries(), Eigen::EigenvaluesOnly);
  VectorX<Scalar> values;
  if (solver.info() == Eigen::Success) {
    values = solver.eigenvalues();
  } else {
    // Eigen's tridiagonal QR can stall on a large cluster of exact zeros.
    // Shifting by the mean eigenvalue moves the cluster away from zero.
    const Scalar shift = Scalar(1) / static_cast<Scalar>(n);
    MatrixX<Scalar> shifted = a.entries();
    shifted.diagonal().array() += shift;
    solver.compute(shifted, Eigen::EigenvaluesOnly);
    if (solver.info() == Eigen::Success) {
      values = solver.eigenvalues().array() - shift;
    } else {
      // The shifted matrix is positive definite, so its singular values are
      // its eigenvalues.
      Eigen::BDCSVD<MatrixX<Scalar>> svd(shifted);
      if (svd.info() != Eigen::Success)
        throw Error(ErrorCode::EigensolverFailure, "symmetric eigensolver did not converge");
      values = svd.singularValues().reverse().array() - shift;
    }
  }
  values.reverseInPlace();  // ascending -> non-increasing
  const Scalar smallest = values.size() > 0 ? values(values.size() - 1) : Scalar(0);
  if (smallest < -negative_eigenvalue_tolerance<Scalar>())
    throw Error(ErrorCode::NegativeEigenvalue,
                "eigenvalue " + std::to_string(static_cast<double>(smallest)) + " below tolerance");
  // Anything below the solver's resolution is a zero eigenvalue.
  const Scalar resolution =
      static_cast<Scalar>(n) * std::numeric_limits<Scalar>::epsilon() * (values.size() > 0 ? values(0) : Scalar(0));
  values = (values.array() > resolution).select(values, Scalar(0));
  const Scalar total = values.sum();
  if (total > Scalar(0)) values /= total;
  return {std::move(values)};
}

/// Renyi alpha-entropy of a spectrum, in bits. Zero eigenvalues contribute
/// nothing; the result is clamped to [0, log2 n] to absorb round-off.
template <typename Scalar>
Scalar renyi_entropy(const Eigenspectrum<Scalar> &spectrum, Alpha alpha) {
  const Scalar a = static_cast<Scalar>(alpha.value());
  Scalar power_sum = 0;
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    const Scalar l = spectrum.values(i);
    if (l > Scalar(0)) power_sum += std::pow(l, a);
  }
  const Scalar h = std::log2(power_sum) / (Scalar(1) - a);
  const Scalar upper = std::log2(static_cast<Scalar>(spectrum.values.size()));
  return std::clamp(h, Scalar(0), upper);
}

template <typename Scalar>
Scalar renyi_entropy(const GramMatrix<Scalar> &a, Alpha alpha) {
  return renyi_entropy(eigenspectrum(a), alpha);
}

namespace detail {

// Normalized Hadamard product over the concatenation of several Gram lists,
// without copying the inputs. Empty overall -> constant Gram of size n.
template <typename Scalar>
GramMatrix<Scalar> joint_gram(std::initializer_list<std::span<const GramMatrix<Scalar>>> groups,
                              Eigen::Index n) {
  MatrixX<Scalar> acc;
  bool first = true;
  for (const auto &group : groups) {
    for (const auto &g : group) {
      if (g.size() != n) throw Error(ErrorCode::DimensionMismatch, "Gram dimensions differ");
      if (first) {
        acc = g.unit_diagonal();
        first = false;
      } else {
        acc.array() *= g.unit_diagonal().array();
      }
    }
  }
  if (first) return GramMatrix<Scalar>::constant(n);
  return GramMatrix<Scalar>::from_unit_diagonal(std::move(acc));
}

template <typename Scalar>
Scalar joint_entropy_of(std::initializer_list<std::span<const GramMatrix<Scalar>>> groups,
                        Eigen::Index n, Alpha alpha) {
  return renyi_entropy(eigenspectrum(joint_gram(groups, n)), alpha);
}

}  // namespace detail

/// Joint entropy of a set of variables via the normalized Hadamard product.
template <typename Scalar>
Scalar joint_entropy(std::span<const GramMatrix<Scalar>> grams, Alpha alpha) {
  if (grams.empty()) throw Error(ErrorCode::EmptyInput, "joint entropy of an empty set");
  return renyi_entropy(eigenspectrum(hadamard_normalized(grams)), alpha);
}

template <typename Scalar>
Scalar joint_entropy(const std::vector<GramMatrix<Scalar>> &grams, Alpha alpha) {
  return joint_entropy(std::span<const GramMatrix<Scalar>>(grams), alpha);
}

/// I(B; {A_1..A_k}) = S(B) + J(A_1..A_k) - J(A_1..A_k, B).
template <typename Scalar>
Scalar mutual_information(const GramMatrix<Scalar> &label_gram,
                          std::span<const GramMatrix<Scalar>> feature_grams, Alpha alpha) {
  if (feature_grams.empty()) throw Error(ErrorCode::EmptyInput, "no feature Grams");
  const Eigen::Index n = label_gram.size();
  const std::span<const GramMatrix<Scalar>> label(&label_gram, 1);
  return renyi_entropy(label_gram, alpha) + detail::joint_entropy_of({feature_grams}, n, alpha) -
         detail::joint_entropy_of({feature_grams, label}, n, alpha);
}

template <typename Scalar>
Scalar mutual_information(const GramMatrix<Scalar> &label_gram,
                          const std::vector<GramMatrix<Scalar>> &feature_grams, Alpha alpha) {
  return mutual_information(label_gram, std::span<const GramMatrix<Scalar>>(feature_grams), alpha);
}

/// I({C_1..C_m}; B | {A_1..A_k})
///   = J(A, C) + J(B, A) - J(A, B, C) - J(A).
/// With no conditioning Grams J(A) is 0 and the result is I(B; C). Returned
/// unclamped: small negative values are estimator variance.
template <typename Scalar>
Scalar conditional_mutual_information(std::span<const GramMatrix<Scalar>> c_grams,
                                      const GramMatrix<Scalar> &label_gram,
                                      std::span<const GramMatrix<Scalar>> a_grams, Alpha alpha) {
  if (c_grams.empty()) throw Error(ErrorCode::EmptyInput, "no target Grams");
  const Eigen::Index n = label_gram.size();
  const std::span<const GramMatrix<Scalar>> label(&label_gram, 1);
  const Scalar j_ac = detail::joint_entropy_of({a_grams, c_grams}, n, alpha);
  const Scalar j_ba = detail::joint_entropy_of({label, a_grams}, n, alpha);
  const Scalar j_abc = detail::joint_entropy_of({a_grams, label, c_grams}, n, alpha);
  const Scalar j_a = a_grams.empty() ? Scalar(0) : detail::joint_entropy_of({a_grams}, n, alpha);
  return j_ac + j_ba - j_abc - j_a;
}

template <typename Scalar>
Scalar conditional_mutual_information(const std::vector<GramMatrix<Scalar>> &c_grams,
                                      const GramMatrix<Scalar> &label_gram,
                                      const std::vector<GramMatrix<Scalar>> &a_grams, Alpha alpha) {
  return conditional_mutual_information(std::span<const GramMatrix<Scalar>>(c_grams), label_gram,
                                        std::span<const GramMatrix<Scalar>>(a_grams), alpha);
}

}  // namespace renyi_fs
