#include "graphbal/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "graphbal/kernels.hpp"

namespace graphbal {

std::string to_string(PathMethod method) {
  switch (method) {
    case PathMethod::greedy_edge:
      return "greedy_edge";
    case PathMethod::nn_chain:
      return "nn_chain";
    case PathMethod::hilbert:
      return "hilbert";
    case PathMethod::exact:
      return "exact";
  }
  return "unknown";
}

PathMethod path_method_from_string(const std::string& name) {
  if (name == "greedy_edge" || name == "greedy") return PathMethod::greedy_edge;
  if (name == "nn_chain") return PathMethod::nn_chain;
  if (name == "hilbert") return PathMethod::hilbert;
  if (name == "exact") return PathMethod::exact;
  throw InputError("unknown path variant '" + name + "'");
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<int> parent_;
};

std::vector<int> traverse(const std::vector<std::array<int, 2>>& adj) {
  const int n = static_cast<int>(adj.size());
  int start = -1;
  for (int v = 0; v < n; ++v) {
    if (adj[v][1] < 0) {
      start = v;
      break;
    }
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  int prev = -1;
  int cur = start;
  while (cur >= 0) {
    order.push_back(cur);
    const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
    prev = cur;
    cur = next;
  }
  return order;
}

std::vector<int> greedy_edge_order(const DistanceMatrix& d) {
  const int n = d.size();
  struct Edge {
    double w;
    int i;
    int j;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({d(i, j), i, j});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.w, a.i, a.j) < std::tie(b.w, b.i, b.j);
  });
  std::vector<std::array<int, 2>> adj(static_cast<std::size_t>(n), {-1, -1});
  DisjointSets sets(n);
  int accepted = 0;
  for (const Edge& e : edges) {
    if (accepted == n - 1) break;
    if (adj[e.i][1] >= 0 || adj[e.j][1] >= 0) continue;
    if (!sets.unite(e.i, e.j)) continue;
    adj[e.i][adj[e.i][0] < 0 ? 0 : 1] = e.j;
    adj[e.j][adj[e.j][0] < 0 ? 0 : 1] = e.i;
    ++accepted;
  }
  return traverse(adj);
}

std::vector<int> nn_chain_order(const DistanceMatrix& d) {
  const int n = d.size();
  int bi = 0, bj = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (d(i, j) < d(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<int> front;  // reversed prefix
  std::vector<int> back{bi, bj};
  used[bi] = used[bj] = 1;
  auto nearest_unused = [&](int from) {
    int best = -1;
    for (int u = 0; u < n; ++u) {
      if (used[u]) continue;
      if (best < 0 || d(from, u) < d(from, best)) best = u;
    }
    return best;
  };
  for (int step = 2; step < n; ++step) {
    const int head = front.empty() ? back.front() : front.back();
    const int tail = back.back();
    const int a = nearest_unused(head);
    const int b = nearest_unused(tail);
    // Prefer the shorter attachment, then the smaller unit index, then the tail.
    const bool use_head = std::make_tuple(d(head, a), a, 1) < std::make_tuple(d(tail, b), b, 0);
    if (use_head) {
      front.push_back(a);
      used[a] = 1;
    } else {
      back.push_back(b);
      used[b] = 1;
    }
  }
  std::vector<int> order(front.rbegin(), front.rend());
  order.insert(order.end(), back.begin(), back.end());
  return order;
}

// Skilling's axes-to-transpose Hilbert transform, in place.
void axes_to_transpose(std::vector<std::uint32_t>& x, int bits) {
  const std::size_t n = x.size();
  const std::uint32_t m = 1u << (bits - 1);
  for (std::uint32_t q = m; q > 1; q >>= 1) {
    const std::uint32_t p = q - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint32_t t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) x[i] ^= x[i - 1];
  std::uint32_t t = 0;
  for (std::uint32_t q = m; q > 1; q >>= 1) {
    if (x[n - 1] & q) t ^= q - 1;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] ^= t;
}

double euclidean_path_length(const Matrix& data, const std::vector<int>& order) {
  double total = 0.0;
  for (std::size_t t = 1; t < order.size(); ++t) {
    total += std::sqrt(kernels::squared_distance(data.row(order[t - 1]).data(),
                                                 data.row(order[t]).data(), data.cols()));
  }
  return total;
}

}  // namespace

Path greedy_path(const DistanceMatrix& d, PathMethod variant) {
  if (d.size() < 2) throw InputError("greedy_path needs N >= 2");
  Path path;
  path.method = variant;
  switch (variant) {
    case PathMethod::greedy_edge:
      path.order = greedy_edge_order(d);
      break;
    case PathMethod::nn_chain:
      path.order = nn_chain_order(d);
      break;
    default:
      throw InputError("greedy_path supports greedy_edge and nn_chain only");
  }
  path.total_length = path_length(d, path.order);
  return path;
}

std::vector<std::vector<std::uint64_t>> hilbert_keys(const Matrix& data, int bits) {
  if (bits < 1 || bits > 31) throw InputError("bits_per_dim must lie in [1, 31]");
  const Eigen::Index n = data.rows();
  const Eigen::Index dims = data.cols();
  const double top = static_cast<double>((1u << bits) - 1u);
  std::vector<double> lo(static_cast<std::size_t>(dims)), span(static_cast<std::size_t>(dims));
  for (Eigen::Index c = 0; c < dims; ++c) {
    lo[c] = data.col(c).minCoeff();
    span[c] = data.col(c).maxCoeff() - lo[c];
  }
  const std::size_t total_bits = static_cast<std::size_t>(bits) * static_cast<std::size_t>(dims);
  const std::size_t words = (total_bits + 63) / 64;
  std::vector<std::vector<std::uint64_t>> keys(static_cast<std::size_t>(n),
                                               std::vector<std::uint64_t>(words, 0));
  std::vector<std::uint32_t> x(static_cast<std::size_t>(dims));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < dims; ++c) {
      const double scaled = span[c] > 0.0 ? (data(i, c) - lo[c]) / span[c] * top : 0.0;
      x[c] = static_cast<std::uint32_t>(std::llround(std::clamp(scaled, 0.0, top)));
    }
    axes_to_transpose(x, bits);
    std::size_t pos = 0;
    auto& key = keys[static_cast<std::size_t>(i)];
    for (int b = bits - 1; b >= 0; --b) {
      for (Eigen::Index c = 0; c < dims; ++c, ++pos) {
        if ((x[c] >> b) & 1u) key[pos / 64] |= std::uint64_t{1} << (63 - pos % 64);
      }
    }
  }
  return keys;
}

Path hilbert_path(const Matrix& data, int bits_per_dim) {
  if (data.rows() < 2) throw InputError("hilbert_path needs N >= 2");
  const auto keys = hilbert_keys(data, bits_per_dim);
  Path path;
  path.method = PathMethod::hilbert;
  path.order.resize(static_cast<std::size_t>(data.rows()));
  std::iota(path.order.begin(), path.order.end(), 0);
  std::stable_sort(path.order.begin(), path.order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  path.total_length = euclidean_path_length(data, path.order);
  return path;
}

Path exact_path(const DistanceMatrix& d) {
  const int n = d.size();
  if (n < 2) throw InputError("exact_path needs N >= 2");
  if (n > kExactPathMaxN) {
    throw CapacityError("exact_path supports N <= " + std::to_string(kExactPathMaxN) + " (got " +
                        std::to_string(n) + "); use greedy_edge or hilbert paths");
  }
  const std::size_t full = (std::size_t{1} << n) - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // rest[mask * n + j]: cheapest way to visit every unit outside `mask`,
  // starting from j, the last unit visited inside `mask`.
  std::vector<double> rest((full + 1) * static_cast<std::size_t>(n), inf);
  for (int j = 0; j < n; ++j) rest[full * n + j] = 0.0;
  for (std::size_t mask = full; mask-- > 1;) {
    for (int j = 0; j < n; ++j) {
      if (!(mask >> j & 1)) continue;
      double best = inf;
      for (int u = 0; u < n; ++u) {
        if (mask >> u & 1) continue;
        best = std::min(best, d(j, u) + rest[(mask | std::size_t{1} << u) * n + u]);
      }
      rest[mask * n + j] = best;
    }
  }
  double optimum = inf;
  for (int s = 0; s < n; ++s) optimum = std::min(optimum, rest[(std::size_t{1} << s) * n + s]);
  const double eps = 1e-12 * (1.0 + optimum);

  // Lexicographically smallest optimal order: pick the smallest feasible unit
  // at every step.
  Path path;
  path.method = PathMethod::exact;
  int cur = 0;
  while (rest[(std::size_t{1} << cur) * n + cur] > optimum + eps) ++cur;
  std::size_t mask = std::size_t{1} << cur;
  path.order.push_back(cur);
  while (mask != full) {
    const double target = rest[mask * n + cur];
    for (int u = 0; u < n; ++u) {
      if (mask >> u & 1) continue;
      const std::size_t next = mask | std::size_t{1} << u;
      if (d(cur, u) + rest[next * n + u] <= target + eps) {
        cur = u;
        mask = next;
        path.order.push_back(u);
        break;
      }
    }
  }
  path.total_length = path_length(d, path.order);
  return path;
}

double path_length(const DistanceMatrix& d, const std::vector<int>& order) {
  const int n = d.size();
  if (static_cast<int>(order.size()) != n) {
    throw InputError("path order has " + std::to_string(order.size()) + " entries for N = " +
                     std::to_string(n));
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : order) {
    if (v < 0 || v >= n || seen[v]) throw InputError("path order is not a permutation of 0..N-1");
    seen[v] = 1;
  }
  double total = 0.0;
  for (std::size_t t = 1; t < order.size(); ++t) total += d(order[t - 1], order[t]);
  return total;
}

}  // namespace graphbal
