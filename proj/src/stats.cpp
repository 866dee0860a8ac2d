#include "graphbal/stats.hpp"

#include <cmath>
#include <string>

namespace graphbal {

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::runs:
      return "runs";
    case StatisticKind::ranks_kw:
      return "ranks_kw";
    case StatisticKind::crossmatch_pairs:
      return "crossmatch_pairs";
    case StatisticKind::knn_counts:
      return "knn_counts";
  }
  return "unknown";
}

namespace {

void check_labels(std::span<const int> labels, int n, int groups) {
  if (static_cast<int>(labels.size()) != n) {
    throw InputError("expected " + std::to_string(n) + " labels, got " +
                     std::to_string(labels.size()));
  }
  for (int z : labels) {
    if (z < 1 || z > groups) {
      throw InputError("label " + std::to_string(z) + " outside 1.." + std::to_string(groups));
    }
  }
}

// n (n-1) ... (n-r+1) / [N (N-1) ... (N-r+1)]: the probability that r fixed
// positions all carry a label shared by n of the N units.
double falling_ratio(int n, int big_n, int r) {
  if (n < r) return 0.0;
  double out = 1.0;
  for (int t = 0; t < r; ++t) out *= static_cast<double>(n - t) / static_cast<double>(big_n - t);
  return out;
}

}  // namespace

StatVector knn_counts(const KnnGraph& graph, std::span<const int> labels, int groups) {
  check_labels(labels, graph.size(), groups);
  StatVector out{StatisticKind::knn_counts, Vector::Zero(groups)};
  for (int i = 0; i < graph.size(); ++i) {
    const int zi = labels[i];
    for (int j : graph.neighbors(i)) {
      if (labels[j] == zi) out.values(zi - 1) += 1.0;
    }
  }
  return out;
}

KnnMoments knn_moments(int n, std::span<const int> group_sizes, int k,
                       const GraphFunctionals& functionals) {
  if (n < 4) throw DegenerateError("kNN moments need N >= 4");
  if (k < 1 || k > n - 1) throw InputError("kNN moments: k out of range");
  const int groups = static_cast<int>(group_sizes.size());
  int total = 0;
  for (int g = 0; g < groups; ++g) {
    if (group_sizes[g] < 2) {
      throw DegenerateError("group " + std::to_string(g + 1) +
                            " has fewer than two units; its kNN count has no variance");
    }
    total += group_sizes[g];
  }
  if (total != n) throw InputError("group sizes do not sum to N");

  const double nn = n;
  const double kk = k;
  const double jj = static_cast<double>(functionals.mutual_pairs);
  const double ss = static_cast<double>(functionals.shared_pairs);
  const double denom = nn * (nn - 1.0) * (nn - 2.0) * (nn - 3.0);
  const double k2n = kk * kk * nn;

  KnnMoments out;
  out.expectation.resize(groups);
  out.covariance.resize(groups, groups);
  out.j_over_n = 2.0 * jj / nn;
  out.s_over_n = 2.0 * ss / nn;
  for (int g = 0; g < groups; ++g) {
    const double ng = group_sizes[g];
    out.expectation(g) = kk * ng * (ng - 1.0) / (nn - 1.0);
    // Variance with the (N - n - 1) factor multiplied through so that
    // n = N - 1 needs no division by zero.
    const double rest = nn - ng;
    const double bracket = rest * (rest - 1.0) * (kk * nn + 2.0 * jj - 2.0 / (nn - 1.0) * k2n) +
                           rest * (ng - 2.0) * (2.0 * ss + kk * nn - k2n);
    out.covariance(g, g) = ng * (ng - 1.0) * bracket / denom;
  }
  const double cross = 2.0 * jj - 2.0 * ss + k2n * (nn - 3.0) / (nn - 1.0);
  for (int g = 0; g < groups; ++g) {
    for (int h = g + 1; h < groups; ++h) {
      const double ng = group_sizes[g];
      const double nh = group_sizes[h];
      const double c = ng * (ng - 1.0) * nh * (nh - 1.0) / denom * cross;
      out.covariance(g, h) = out.covariance(h, g) = c;
    }
  }

  // Finite-sample correlation written with R_gh and f(n).
  auto f_hat = [&](double m) {
    return kk * nn + 2.0 * jj + (m - 2.0) / (nn - m - 1.0) * (2.0 * ss + kk * nn - k2n) -
           2.0 / (nn - 1.0) * k2n;
  };
  out.correlation_hat = SquareMatrix::Identity(groups, groups);
  for (int g = 0; g < groups; ++g) {
    for (int h = g + 1; h < groups; ++h) {
      const double ng = group_sizes[g];
      const double nh = group_sizes[h];
      if (nn - ng - 1.0 <= 0.0 || nn - nh - 1.0 <= 0.0) continue;
      const double r_gh = std::sqrt(ng * (ng - 1.0) * nh * (nh - 1.0)) /
                          std::sqrt((nn - ng) * (nn - ng - 1.0) * (nn - nh) * (nn - nh - 1.0));
      const double fg = f_hat(ng);
      const double fh = f_hat(nh);
      const double omega = fg > 0.0 && fh > 0.0 ? r_gh * cross / std::sqrt(fg * fh) : 0.0;
      out.correlation_hat(g, h) = out.correlation_hat(h, g) = omega;
    }
  }
  return out;
}

Standardized knn_standardize(const StatVector& counts, const KnnMoments& moments) {
  const Eigen::Index groups = counts.values.size();
  if (moments.expectation.size() != groups) {
    throw InputError("knn_standardize: counts and moments have different dimensions");
  }
  Standardized out;
  out.u.resize(groups);
  for (Eigen::Index g = 0; g < groups; ++g) {
    const double var = moments.covariance(g, g);
    if (!(var > 0.0)) {
      throw DegenerateError("kNN count of group " + std::to_string(g + 1) +
                            " has zero null variance");
    }
    out.u(g) = (counts.values(g) - 0.5 - moments.expectation(g)) / std::sqrt(var);
  }
  out.omega = moments.correlation_hat;
  return out;
}

StatVector run_counts(const Path& path, std::span<const int> labels, int groups) {
  check_labels(labels, static_cast<int>(path.order.size()), groups);
  StatVector out{StatisticKind::runs, Vector::Zero(groups)};
  int prev = 0;
  for (int unit : path.order) {
    const int z = labels[unit];
    if (z != prev) out.values(z - 1) += 1.0;
    prev = z;
  }
  return out;
}

MomentSet run_moments(int n, std::span<const int> group_sizes) {
  const int groups = static_cast<int>(group_sizes.size());
  for (int g = 0; g < groups; ++g) {
    if (group_sizes[g] < 1) throw InputError("run_moments: group sizes must be positive");
  }
  // R_g = n_g - A_g with A_g the number of adjacent (g, g) pairs along the
  // path. Over ordered pairs of the N - 1 path edges: N - 1 identical pairs,
  // 2 (N - 2) sharing one unit, (N - 2)(N - 3) disjoint.
  const double same = n - 1;
  const double touching = n >= 3 ? 2.0 * (n - 2) : 0.0;
  const double disjoint = n >= 4 ? static_cast<double>(n - 2) * (n - 3) : 0.0;
  MomentSet out;
  out.mean.resize(groups);
  out.covariance.resize(groups, groups);
  Vector mean_adjacent(groups);
  for (int g = 0; g < groups; ++g) {
    const int ng = group_sizes[g];
    out.mean(g) = static_cast<double>(ng) * (n - ng + 1) / n;
    mean_adjacent(g) = same * falling_ratio(ng, n, 2);
  }
  for (int g = 0; g < groups; ++g) {
    const int ng = group_sizes[g];
    const double second = same * falling_ratio(ng, n, 2) + touching * falling_ratio(ng, n, 3) +
                          disjoint * falling_ratio(ng, n, 4);
    out.covariance(g, g) = second - mean_adjacent(g) * mean_adjacent(g);
    for (int h = g + 1; h < groups; ++h) {
      const int nh = group_sizes[h];
      const double both = n >= 4 ? disjoint * falling_ratio(ng, n, 2) *
                                       (static_cast<double>(nh) * (nh - 1)) /
                                       ((n - 2.0) * (n - 3.0))
                                 : 0.0;
      out.covariance(g, h) = out.covariance(h, g) = both - mean_adjacent(g) * mean_adjacent(h);
    }
  }
  out.correlation = covariance_to_correlation(out.covariance);
  return out;
}

KruskalWallis kw_rank_statistic(const Path& path, std::span<const int> labels, int groups) {
  if (groups < 2) throw InputError("Kruskal-Wallis statistic needs G >= 2");
  const int n = static_cast<int>(path.order.size());
  check_labels(labels, n, groups);
  Vector rank_sum = Vector::Zero(groups);
  Vector count = Vector::Zero(groups);
  for (int t = 0; t < n; ++t) {
    const int g = labels[path.order[t]] - 1;
    rank_sum(g) += t + 1;
    count(g) += 1.0;
  }
  const double centre = (n + 1) / 2.0;
  double acc = 0.0;
  for (int g = 0; g < groups; ++g) {
    if (count(g) == 0.0) throw InputError("Kruskal-Wallis: group " + std::to_string(g + 1) + " is empty");
    const double dev = rank_sum(g) / count(g) - centre;
    acc += count(g) * dev * dev;
  }
  return {12.0 / (static_cast<double>(n) * (n + 1)) * acc, groups - 1};
}

StatVector crossmatch_counts(const Matching& matching, std::span<const int> labels, int groups) {
  check_labels(labels, matching.size, groups);
  StatVector out{StatisticKind::crossmatch_pairs, Vector::Zero(groups * (groups - 1) / 2)};
  // Offset of row g in the packed upper triangle.
  std::vector<int> offset(static_cast<std::size_t>(groups), 0);
  for (int g = 1; g < groups; ++g) offset[g] = offset[g - 1] + (groups - g);
  for (const auto& [a, b] : matching.pairs) {
    int g = labels[a] - 1;
    int h = labels[b] - 1;
    if (g == h) continue;
    if (g > h) std::swap(g, h);
    out.values(offset[g] + (h - g - 1)) += 1.0;
  }
  return out;
}

Vector crossmatch_group_totals(const StatVector& pairs, int groups) {
  Vector totals = Vector::Zero(groups);
  int idx = 0;
  for (int g = 0; g < groups; ++g) {
    for (int h = g + 1; h < groups; ++h, ++idx) {
      totals(g) += pairs.values(idx);
      totals(h) += pairs.values(idx);
    }
  }
  return totals;
}

SquareMatrix covariance_to_correlation(const SquareMatrix& covariance) {
  const Eigen::Index m = covariance.rows();
  SquareMatrix out = SquareMatrix::Identity(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double vi = covariance(i, i);
      const double vj = covariance(j, j);
      if (vi > 0.0 && vj > 0.0) {
        out(i, j) = out(j, i) = covariance(i, j) / std::sqrt(vi * vj);
      }
    }
  }
  return out;
}

}  // namespace graphbal
