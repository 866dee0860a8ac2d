#pragma once

#include <string>
#include <vector>

#include "graphbal/core.hpp"

namespace graphbal {

enum class PathMethod { greedy_edge, nn_chain, hilbert, exact };

std::string to_string(PathMethod method);
PathMethod path_method_from_string(const std::string& name);

/// Hamiltonian path: `order` visits every unit (0-based) exactly once.
struct Path {
  std::vector<int> order;
  PathMethod method = PathMethod::greedy_edge;
  double total_length = 0.0;
};

/// Largest N accepted by exact_path.
inline constexpr int kExactPathMaxN = 16;

/// Greedy Hamiltonian path.
///
/// greedy_edge scans all edges by ascending (distance, i, j) and keeps an edge
/// when both endpoints have degree < 2 and no cycle forms; the resulting path
/// is traversed from its lower-indexed endpoint. nn_chain starts from the
/// closest pair and repeatedly attaches the nearest unused unit to whichever
/// end is closer.
Path greedy_path(const DistanceMatrix& d, PathMethod variant = PathMethod::greedy_edge);

/// Orders units along a d-dimensional Hilbert curve after min-max scaling
/// each column to [0, 2^bits - 1]. Ties keep index order. The path length is
/// measured with euclidean distances between consecutive rows.
Path hilbert_path(const Matrix& data, int bits_per_dim = 10);

/// Packed Hilbert keys, one row of 64-bit words per unit, compared
/// lexicographically (most significant word first).
std::vector<std::vector<std::uint64_t>> hilbert_keys(const Matrix& data, int bits_per_dim);

/// Minimum-length Hamiltonian path by Held-Karp dynamic programming.
/// Throws CapacityError for N > kExactPathMaxN.
Path exact_path(const DistanceMatrix& d);

/// Sum of consecutive distances; throws InputError if `order` is not a
/// permutation of 0..N-1.
double path_length(const DistanceMatrix& d, const std::vector<int>& order);

}  // namespace graphbal
