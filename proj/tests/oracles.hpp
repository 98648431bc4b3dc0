#pragma once

// Brute-force reference implementations used only by the tests. None of them
// call into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Cyclic Jacobi rotations until the off-diagonal norm is tiny. Returns the
// eigenvalues in non-increasing order.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) < 1e-14) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Discrete Renyi entropy of a probability vector, bits.
inline double renyi_bits(const std::vector<double> &p, double alpha) {
  double s = 0.0;
  for (double v : p)
    if (v > 0) s += std::pow(v, alpha);
  return std::log2(s) / (1.0 - alpha);
}

inline std::vector<double> class_proportions(const std::vector<int> &labels) {
  std::map<int, double> counts;
  for (int l : labels) counts[l] += 1.0;
  std::vector<double> p;
  for (auto [k, c] : counts) p.push_back(c / static_cast<double>(labels.size()));
  return p;
}

// Renyi entropy of a matrix given explicitly (trace 1), via Jacobi.
inline double matrix_renyi_bits(const Eigen::MatrixXd &a, double alpha) {
  std::vector<double> ev = jacobi_eigenvalues(a);
  for (double &v : ev) v = std::max(v, 0.0);
  const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
  for (double &v : ev) v /= total;
  return renyi_bits(ev, alpha);
}

// Explicit NPD matrix from a Gaussian kernel, written out entry by entry.
inline Eigen::MatrixXd gaussian_npd(const std::vector<double> &x, double sigma) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      a(i, j) = std::exp(-d * d / (2 * sigma * sigma)) / static_cast<double>(n);
    }
  return a;
}

// Trace-normalized entrywise product.
inline Eigen::MatrixXd hadamard_trace_normalized(const std::vector<Eigen::MatrixXd> &ms) {
  Eigen::MatrixXd acc = ms.front();
  for (std::size_t k = 1; k < ms.size(); ++k) acc = acc.cwiseProduct(ms[k]);
  return acc / acc.trace();
}

// Composite Simpson rule on [a, b] with m (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int m = 20000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Chi-square CDF by quadrature after t = u^2, which removes the t^(-1/2)
// singularity at df = 1.
inline double chi2_cdf(double x, int df) {
  const double k = df / 2.0;
  const double norm = std::pow(2.0, k) * std::tgamma(k);
  const auto f = [&](double u) { return 2.0 * std::pow(u, 2.0 * k - 1.0) * std::exp(-u * u / 2.0) / norm; };
  return simpson(f, 0.0, std::sqrt(x));
}

inline double chi2_quantile_bisect(double p, int df) {
  double lo = 0.0, hi = 200.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Two-sided Student-t p-value by integrating the density.
inline double student_two_sided(double t, int df) {
  const double nu = df;
  const double c = std::tgamma((nu + 1) / 2) / (std::sqrt(nu * M_PI) * std::tgamma(nu / 2));
  const auto f = [&](double x) { return c * std::pow(1 + x * x / nu, -(nu + 1) / 2); };
  return 1.0 - 2.0 * simpson(f, 0.0, std::abs(t));
}

// Exhaustive rank-sum test: every split of the pooled midranks into groups of
// the original sizes is equally likely under the null.
inline double rank_sum_enumeration(const std::vector<double> &a, const std::vector<double> &b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), n1 = a.size();
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (double v : pooled) {
      less += v < pooled[i];
      equal += v == pooled[i];
    }
    ranks[i] = less + (equal + 1.0) / 2.0;
  }
  const double total = std::accumulate(ranks.begin(), ranks.end(), 0.0);
  const double expected = total * static_cast<double>(n1) / static_cast<double>(n);
  const double observed = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(n1), 0.0);
  const double dev = std::abs(observed - expected);
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n1), true);
  std::sort(pick.begin(), pick.end());
  double hits = 0, count = 0;
  do {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) s += ranks[i];
    count += 1;
    if (std::abs(s - expected) >= dev - 1e-9) hits += 1;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return hits / count;
}

// Plug-in conditional MI in nats over integer codes using maps.
inline double plugin_cmi(const std::vector<int> &x, const std::vector<int> &y, const std::vector<int> &z) {
  std::map<std::tuple<int, int, int>, double> xyz;
  std::map<std::pair<int, int>, double> xz, yz;
  std::map<int, double> zc;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xyz[{x[i], y[i], z[i]}] += 1;
    xz[{x[i], z[i]}] += 1;
    yz[{y[i], z[i]}] += 1;
    zc[z[i]] += 1;
  }
  const double n = static_cast<double>(x.size());
  double mi = 0;
  for (const auto &[k, c] : xyz) {
    const auto [a, b, g] = k;
    mi += c / n * std::log(c * zc[g] / (xz[{a, g}] * yz[{b, g}]));
  }
  return mi;
}

}  // namespace oracle
