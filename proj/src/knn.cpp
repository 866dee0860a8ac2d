#include <algorithm>
#include <queue>
#include <string>
#include <utility>

#include "graphbal/kernels.hpp"
#include "graphbal/nngraph.hpp"

namespace graphbal {

KnnGraph::KnnGraph(int n, int k, std::vector<int> neighbors)
    : n_(n), k_(k), neighbors_(std::move(neighbors)) {
  if (k < 1 || k > n - 1) throw InputError("KnnGraph: k must lie in [1, N-1]");
  if (neighbors_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(k)) {
    throw InputError("KnnGraph: neighbor table must have N * k entries");
  }
  for (int i = 0; i < n; ++i) {
    for (int j : this->neighbors(i)) {
      if (j < 0 || j >= n || j == i) {
        throw InputError("KnnGraph: invalid neighbor " + std::to_string(j) + " of unit " +
                         std::to_string(i));
      }
    }
  }
}

std::vector<int> KnnGraph::in_degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (int j : neighbors_) ++deg[j];
  return deg;
}

namespace {

class KdTree {
 public:
  explicit KdTree(const Matrix& x) : x_(x), index_(static_cast<std::size_t>(x.rows())) {
    for (std::size_t i = 0; i < index_.size(); ++i) index_[i] = static_cast<int>(i);
    nodes_.reserve(2 * index_.size() / kLeafSize + 2);
    build(0, static_cast<int>(index_.size()));
  }

  void query(int self, int k, std::span<int> out) const {
    Heap heap;
    search(0, x_.row(self).data(), self, k, heap);
    for (int t = k - 1; t >= 0; --t) {
      out[static_cast<std::size_t>(t)] = heap.top().second;
      heap.pop();
    }
  }

 private:
  static constexpr int kLeafSize = 12;
  using Candidate = std::pair<double, int>;
  // Max-heap on (squared distance, index): top is the current worst.
  using Heap = std::priority_queue<Candidate>;

  struct Node {
    int begin;
    int end;
    int dim = -1;
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;
    int best_dim = 0;
    double best_spread = -1.0;
    for (Eigen::Index c = 0; c < x_.cols(); ++c) {
      double lo = x_(index_[begin], c), hi = lo;
      for (int t = begin + 1; t < end; ++t) {
        const double v = x_(index_[t], c);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = static_cast<int>(c);
      }
    }
    if (best_spread <= 0.0) return id;  // all points identical: keep as leaf
    const int mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                     [&](int a, int b) { return x_(a, best_dim) < x_(b, best_dim); });
    const double split = x_(index_[mid], best_dim);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].dim = best_dim;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(int id, const double* q, int self, int k, Heap& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      for (int t = node.begin; t < node.end; ++t) {
        const int p = index_[static_cast<std::size_t>(t)];
        if (p == self) continue;
        const Candidate cand{kernels::squared_distance(q, x_.row(p).data(), x_.cols()), p};
        if (static_cast<int>(heap.size()) < k) {
          heap.push(cand);
        } else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      return;
    }
    const double diff = q[node.dim] - node.split;
    const int near = diff <= 0.0 ? node.left : node.right;
    const int far = diff <= 0.0 ? node.right : node.left;
    search(near, q, self, k, heap);
    // Prune only when strictly farther: a far point at exactly the current
    // worst distance may still win the index tie-break.
    if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().first) {
      search(far, q, self, k, heap);
    }
  }

  const Matrix& x_;
  std::vector<int> index_;
  std::vector<Node> nodes_;
};

}  // namespace

KnnGraph knn_graph(const Matrix& data, int k, KnnBackend backend, Execution exec) {
  const int n = static_cast<int>(data.rows());
  if (n < 2) throw InputError("knn_graph needs N >= 2");
  if (k < 1 || k > n - 1) {
    throw InputError("knn_graph: k = " + std::to_string(k) + " must lie in [1, " +
                     std::to_string(n - 1) + "]");
  }
  std::vector<int> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
  if (backend == KnnBackend::brute_force) {
    if (exec == Execution::serial) {
      kernels::serial::knn_brute_force(data, k, out);
    } else {
      kernels::omp::knn_brute_force(data, k, out);
    }
  } else {
    const KdTree tree(data);
    std::span<int> view(out);
    const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 32) if (parallel)
    for (int i = 0; i < n; ++i) {
      tree.query(i, k, view.subspan(static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)));
    }
  }
  return KnnGraph(n, k, std::move(out));
}

GraphFunctionals graph_functionals(const KnnGraph& graph) {
  GraphFunctionals out;
  const int n = graph.size();
  for (int i = 0; i < n; ++i) {
    for (int j : graph.neighbors(i)) {
      if (j <= i) continue;
      const auto back = graph.neighbors(j);
      if (std::find(back.begin(), back.end(), i) != back.end()) ++out.mutual_pairs;
    }
  }
  for (int deg : graph.in_degrees()) {
    out.shared_pairs += static_cast<std::int64_t>(deg) * (deg - 1) / 2;
  }
  return out;
}

}  // namespace graphbal
