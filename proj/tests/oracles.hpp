// Independent brute-force oracles used by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "graphbal/core.hpp"

namespace oracle {

using graphbal::Matrix;

inline Matrix random_points(int n, int d, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = normal(gen);
  }
  return x;
}

inline Matrix random_uniform_points(int n, int d, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = unif(gen);
  }
  return x;
}

inline std::vector<std::vector<double>> distances(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < x.cols(); ++c) {
        const double diff = x(i, c) - x(j, c);
        s += diff * diff;
      }
      d[i][j] = std::sqrt(s);
    }
  }
  return d;
}

/// k nearest by (squared distance, index), full scan.
inline std::vector<std::vector<int>> knn(const Matrix& x, int k) {
  const int n = static_cast<int>(x.rows());
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> cand;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (int c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
      cand.emplace_back(s, j);
    }
    std::sort(cand.begin(), cand.end());
    for (int t = 0; t < k; ++t) out[i].push_back(cand[t].second);
  }
  return out;
}

inline double path_cost(const std::vector<std::vector<double>>& d, const std::vector<int>& order) {
  double s = 0.0;
  for (std::size_t t = 1; t < order.size(); ++t) s += d[order[t - 1]][order[t]];
  return s;
}

/// Shortest Hamiltonian path by enumerating all orders.
inline double best_path(const std::vector<std::vector<double>>& d) {
  std::vector<int> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    if (order.front() < order.back()) best = std::min(best, path_cost(d, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

/// Minimum perfect matching weight over all pairings of `units`.
inline double best_matching(const std::vector<std::vector<double>>& d, std::vector<int> units) {
  if (units.empty()) return 0.0;
  const int a = units.front();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t < units.size(); ++t) {
    std::vector<int> rest;
    for (std::size_t s = 1; s < units.size(); ++s) {
      if (s != t) rest.push_back(units[s]);
    }
    best = std::min(best, d[a][units[t]] + best_matching(d, rest));
  }
  return best;
}

inline long long count_matchings(int n) {
  long long c = 1;
  for (int k = n - 1; k > 1; k -= 2) c *= k;
  return c;
}

/// Calls visit(labels) once per distinct labeling with the given group sizes
/// (labels 1..G), built by recursive placement rather than permutation.
inline void for_each_labeling(const std::vector<int>& sizes,
                              const std::function<void(const std::vector<int>&)>& visit) {
  int n = 0;
  for (int s : sizes) n += s;
  std::vector<int> labels(n, 0);
  std::vector<int> left = sizes;
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      visit(labels);
      return;
    }
    for (std::size_t g = 0; g < left.size(); ++g) {
      if (left[g] == 0) continue;
      --left[g];
      labels[pos] = static_cast<int>(g) + 1;
      rec(pos + 1);
      ++left[g];
    }
  };
  rec(0);
}

/// Mean and population covariance of a statistic over all labelings.
struct Moments {
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
  long long count = 0;
};

inline Moments exhaustive_moments(
    const std::vector<int>& sizes,
    const std::function<std::vector<double>(const std::vector<int>&)>& stat) {
  std::vector<std::vector<double>> values;
  for_each_labeling(sizes, [&](const std::vector<int>& z) { values.push_back(stat(z)); });
  const std::size_t m = values.front().size();
  Moments out;
  out.count = static_cast<long long>(values.size());
  out.mean.assign(m, 0.0);
  for (const auto& v : values) {
    for (std::size_t i = 0; i < m; ++i) out.mean[i] += v[i];
  }
  for (double& x : out.mean) x /= static_cast<double>(values.size());
  out.cov.assign(m, std::vector<double>(m, 0.0));
  for (const auto& v : values) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        out.cov[i][j] += (v[i] - out.mean[i]) * (v[j] - out.mean[j]);
      }
    }
  }
  for (auto& row : out.cov) {
    for (double& x : row) x /= static_cast<double>(values.size());
  }
  return out;
}

/// Number of maximal same-label blocks per group along a sequence.
inline std::vector<double> scan_blocks(const std::vector<int>& seq, int groups) {
  std::vector<double> out(groups, 0.0);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const bool starts = t == 0 || seq[t] != seq[t - 1];
    if (starts) out[seq[t] - 1] += 1.0;
  }
  return out;
}

/// Composite Simpson integral of f over [a, b] with 2m panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / (2.0 * m);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double chi_square_density(double x, int nu) {
  if (x <= 0.0) return 0.0;
  const double h = nu / 2.0;
  return std::exp((h - 1.0) * std::log(x) - x / 2.0 - h * std::log(2.0) - std::lgamma(h));
}

inline double f_density(double x, int d1, int d2) {
  if (x <= 0.0) return 0.0;
  const double a = d1 / 2.0;
  const double b = d2 / 2.0;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp(a * std::log(static_cast<double>(d1) / d2) + (a - 1.0) * std::log(x) -
                  (a + b) * std::log1p(d1 * x / d2) - log_beta);
}

/// Upper tail by integrating the density on [t, t + span] after the
/// substitution x = t + u^2, which tames the decay and the x^(a-1) cusp.
inline double upper_tail(const std::function<double(double)>& density, double t, double span) {
  const double top = std::sqrt(span);
  return simpson([&](double u) { return 2.0 * u * density(t + u * u); }, 0.0, top, 200000);
}

}  // namespace oracle
