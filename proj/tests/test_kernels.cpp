#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "renyi_fs/error.hpp"
#include "renyi_fs/kernels.hpp"

using namespace renyi_fs;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

Eigen::VectorXd random_column(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng);
  return x;
}

void check_npd(const Gram &g) {
  const Eigen::MatrixXd a = g.entries();
  const double n = static_cast<double>(a.rows());
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(a.trace() - 1.0) <= 1e-10);
  for (Eigen::Index i = 0; i < a.rows(); ++i) CHECK(a(i, i) == 1.0 / n);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() <= 1.0 / n + 1e-15);
}

}  // namespace

TEST_CASE("median bandwidth") {
  CHECK(median_bandwidth(vec({0, 1})) == 1.0);
  CHECK(median_bandwidth(vec({-1, 0, 1})) == 1.0);
  CHECK(median_bandwidth(vec({0, 0, 0})) == 1.0);
  CHECK(median_bandwidth(vec({4})) == 1.0);
  // distances 1 1 2 2 3 4
  CHECK(median_bandwidth(vec({0, 1, 4, 2})) == 2.0);
  // distances 1 2 3 3 4 5 6 7 9 10 -> (4 + 5) / 2
  CHECK(median_bandwidth(vec({0, 1, 3, 6, 10})) == 4.5);
}

TEST_CASE("gaussian Gram") {
  const Gram single = gram_gaussian(vec({3.7}), 1.0);
  CHECK(single.entries()(0, 0) == 1.0);

  const Gram twins = gram_gaussian(vec({2, 2}), 0.7);
  CHECK(twins.entries().isApprox(Eigen::MatrixXd::Constant(2, 2, 0.5)));

  const Gram pair = gram_gaussian(vec({0, 1}), 1.0);
  CHECK(pair.entries()(0, 1) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(pair.entries()(0, 1) == doctest::Approx(0.303265).epsilon(1e-6));

  CHECK_THROWS_AS(gram_gaussian(vec({0, 1}), 0.0), Error);
  CHECK_THROWS_AS(gram_gaussian(vec({0, 1}), -1.0), Error);
}

TEST_CASE("gaussian Gram matches the explicit kernel and is PSD") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd x = random_column(25, seed);
    const double sigma = median_bandwidth(x);
    const Gram g = gram_gaussian(x, sigma);
    check_npd(g);
    const std::vector<double> xs(x.data(), x.data() + x.size());
    CHECK((g.entries() - oracle::gaussian_npd(xs, sigma)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(oracle::jacobi_eigenvalues(g.entries()).back() >= -1e-10);
  }
}

TEST_CASE("delta Gram") {
  const Gram g = gram_delta(std::vector<int>{0, 0, 1, 1});
  Eigen::MatrixXd expected(4, 4);
  expected << 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1;
  CHECK(g.entries().isApprox(expected / 4.0));
  check_npd(g);

  const auto ev = oracle::jacobi_eigenvalues(g.entries());
  CHECK(ev[0] == doctest::Approx(0.5));
  CHECK(ev[1] == doctest::Approx(0.5));
  CHECK(std::abs(ev[2]) < 1e-12);

  CHECK(gram_delta(std::vector<int>{3, 3, 3, 3}).entries().isApprox(Eigen::MatrixXd::Constant(4, 4, 0.25)));
  CHECK(gram_delta(std::vector<int>{0, 1, 2, 3}).entries().isApprox(Eigen::MatrixXd::Identity(4, 4) / 4.0));
}

TEST_CASE("normalized Hadamard products") {
  const Gram x = gram_delta(std::vector<int>{0, 0, 1, 1});
  const Gram z = gram_delta(std::vector<int>{0, 1, 0, 1});
  CHECK(hadamard_normalized(std::vector<Gram>{x}).entries() == x.entries());
  CHECK(hadamard_normalized(std::vector<Gram>{x, z}).entries().isApprox(Eigen::MatrixXd::Identity(4, 4) / 4.0));
  CHECK(hadamard_normalized(std::vector<Gram>{x, x}).entries() == x.entries());

  const Gram c = gram_delta(std::vector<int>(4, 1));
  CHECK(hadamard_normalized(std::vector<Gram>{x, c}).entries() == x.entries());

  const Gram small = gram_delta(std::vector<int>{0, 1});
  CHECK_THROWS_AS(hadamard_normalized(std::vector<Gram>{x, small}), Error);
  CHECK_THROWS_AS(hadamard_normalized(std::vector<Gram>{}), Error);
}

TEST_CASE("Hadamard product equals the trace-normalized raw product and commutes") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    std::vector<Gram> grams;
    std::vector<Eigen::MatrixXd> raw;
    for (unsigned k = 0; k < 4; ++k) {
      const Eigen::VectorXd col = random_column(15, seed * 10 + k);
      grams.push_back(gram_gaussian(col, median_bandwidth(col)));
      raw.push_back(grams.back().entries());
    }
    const Gram forward = hadamard_normalized(grams);
    std::vector<Gram> reversed(grams.rbegin(), grams.rend());
    const Gram backward = hadamard_normalized(reversed);
    CHECK((forward.entries() - backward.entries()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((forward.entries() - oracle::hadamard_trace_normalized(raw)).cwiseAbs().maxCoeff() <= 1e-12);
    check_npd(forward);
  }
}

TEST_CASE("long products keep an exact diagonal") {
  std::vector<Gram> grams;
  for (unsigned k = 0; k < 200; ++k) {
    const Eigen::VectorXd col = random_column(30, k);
    grams.push_back(gram_gaussian(col, median_bandwidth(col)));
  }
  const Gram g = hadamard_normalized(grams);
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(g.entries()(i, i) == 1.0 / 30.0);
}

TEST_CASE("row and column permutation") {
  const Gram x = gram_delta(std::vector<int>{0, 0, 1, 2});
  const std::vector<std::size_t> perm{3, 2, 1, 0};
  const Gram p = permuted(x, perm);
  CHECK(p.entries().isApprox(gram_delta(std::vector<int>{2, 1, 0, 0}).entries()));
  check_npd(p);
}
