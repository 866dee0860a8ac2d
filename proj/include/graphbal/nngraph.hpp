#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphbal/core.hpp"

namespace graphbal {

enum class KnnBackend { kd_tree, brute_force };

/// Directed k-nearest-neighbor graph. Row i lists the k nearest other units
/// in ascending (distance, index) order.
class KnnGraph {
 public:
  KnnGraph(int n, int k, std::vector<int> neighbors);

  int size() const { return n_; }
  int k() const { return k_; }
  std::span<const int> neighbors(int i) const {
    return {neighbors_.data() + static_cast<std::size_t>(i) * k_, static_cast<std::size_t>(k_)};
  }
  const std::vector<int>& flat() const { return neighbors_; }
  std::vector<int> in_degrees() const;

  friend bool operator==(const KnnGraph&, const KnnGraph&) = default;

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<int> neighbors_;
};

/// k nearest neighbors of every row by euclidean distance on the given
/// coordinates, self excluded, ties broken by the smaller index. Both backends
/// return identical graphs.
KnnGraph knn_graph(const Matrix& data, int k, KnnBackend backend = KnnBackend::kd_tree,
                   Execution exec = Execution::parallel);

/// Mutual-neighbor pairs J and shared-neighbor pairs S, both counted as
/// unordered pairs: J = #{i < j : j -> i and i -> j}, S = sum_i C(indeg(i), 2).
struct GraphFunctionals {
  std::int64_t mutual_pairs = 0;
  std::int64_t shared_pairs = 0;
};

GraphFunctionals graph_functionals(const KnnGraph& graph);

/// Non-bipartite matching. For odd N one unit is left out (`dropped_unit`).
struct Matching {
  std::vector<std::pair<int, int>> pairs;  // each pair has first < second
  std::optional<int> dropped_unit;
  double total_weight = 0.0;
  int size = 0;  // number of units, including any dropped unit
};

/// Exact minimum-weight perfect matching (weighted blossom algorithm). Odd N
/// appends a phantom unit at distance 1 + max(D) from every unit; its partner
/// becomes `dropped_unit`.
Matching nbm_matching(const DistanceMatrix& d);

namespace detail {

struct WeightedEdge {
  int u;
  int v;
  std::int64_t weight;
};

/// Maximum-weight matching on a general graph with integer weights.
/// With `max_cardinality`, the maximum weight among maximum-cardinality
/// matchings. Returns mate[v] (-1 if unmatched).
std::vector<int> max_weight_matching(int n, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality);

/// Matching plus the final dual solution: doubled vertex duals, blossom
/// duals (indices n..2n-1) and the blossom nesting.
struct MatchingCertificate {
  std::vector<int> mate;
  std::vector<std::int64_t> dual;
  std::vector<int> blossom_parent;

  /// Doubled reduced cost of edge (u, v); every edge of a graph is dual
  /// feasible for this solution iff its slack is nonnegative.
  std::int64_t slack(int u, int v, std::int64_t weight) const;
};

MatchingCertificate max_weight_matching_certified(int n, const std::vector<WeightedEdge>& edges,
                                                  bool max_cardinality);

}  // namespace detail

}  // namespace graphbal
