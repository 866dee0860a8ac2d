#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "graphbal/nngraph.hpp"

namespace graphbal {

namespace {

// Distances are mapped to integer weights (reference - d) * 2^40 / reference,
// so larger weight means shorter pair. Relative resolution is 2^-40.
constexpr double kWeightScale = 1099511627776.0;  // 2^40

// Below this size the complete graph is handed to the matcher directly.
constexpr int kSparseThreshold = 64;
constexpr int kInitialCandidates = 10;

}  // namespace

Matching nbm_matching(const DistanceMatrix& d) {
  const int n = d.size();
  if (n < 2) throw InputError("nbm_matching needs N >= 2");
  const bool odd = n % 2 == 1;
  const int m = odd ? n + 1 : n;
  const double max_d = d.max_entry();
  const double phantom_d = 1.0 + max_d;
  const double reference = odd ? phantom_d : max_d;
  auto dist = [&](int i, int j) { return j == n ? phantom_d : d(i, j); };
  auto weight = [&](int i, int j) {
    const double w = reference > 0.0 ? (reference - dist(i, j)) / reference * kWeightScale : 0.0;
    return static_cast<std::int64_t>(std::llround(w));
  };

  // Solve on a sparse candidate graph (nearest neighbors plus all phantom
  // edges), then price every pair with the final duals. Pairs with negative
  // reduced cost join the candidates and the solve repeats, so the result
  // is optimal for the complete graph.
  std::vector<char> present(static_cast<std::size_t>(m) * m, 0);
  std::vector<detail::WeightedEdge> edges;
  auto add_edge = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    char& flag = present[static_cast<std::size_t>(i) * m + j];
    if (flag) return;
    flag = 1;
    edges.push_back({i, j, weight(i, j)});
  };
  auto add_neighbors = [&](int k) {
    if (k >= n - 1) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) add_edge(i, j);
      }
      return;
    }
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::iota(idx.begin(), idx.end(), 0);
      std::swap(idx[0], idx[i]);
      std::partial_sort(idx.begin() + 1, idx.begin() + 1 + k, idx.end(), [&](int a, int b) {
        return d(i, a) < d(i, b) || (d(i, a) == d(i, b) && a < b);
      });
      for (int t = 1; t <= k; ++t) add_edge(i, idx[t]);
    }
  };

  int k = m <= kSparseThreshold ? n - 1 : kInitialCandidates;
  add_neighbors(k);
  if (odd) {
    for (int i = 0; i < n; ++i) add_edge(i, n);
  }

  std::vector<int> mate;
  while (true) {
    const detail::MatchingCertificate cert = detail::max_weight_matching_certified(m, edges, true);
    if (std::count(cert.mate.begin(), cert.mate.end(), -1) > 0) {
      if (k >= n - 1) throw std::logic_error("nbm_matching: matching is not perfect");
      k = std::min(n - 1, 2 * k);
      add_neighbors(k);
      continue;
    }
    bool added = false;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (present[static_cast<std::size_t>(i) * m + j]) continue;
        if (cert.slack(i, j, weight(i, j)) < 0) {
          add_edge(i, j);
          added = true;
        }
      }
    }
    if (!added) {
      mate = cert.mate;
      break;
    }
  }

  Matching out;
  out.size = n;
  for (int v = 0; v < m; ++v) {
    if (v == n) {
      out.dropped_unit = mate[v];
    } else if (v < mate[v] && mate[v] < n) {
      out.pairs.emplace_back(v, mate[v]);
      out.total_weight += d(v, mate[v]);
    }
  }
  return out;
}

}  // namespace graphbal
