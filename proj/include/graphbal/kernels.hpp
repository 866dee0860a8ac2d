#pragma once

// Data-parallel inner loops. Every kernel has a serial reference version
// and an OpenMP version; the two must agree bit for bit, so the parallel
// versions only split independent output rows across threads and never
// change the order of floating-point accumulation.

#include <cstdint>
#include <span>
#include <vector>

#include "graphbal/core.hpp"

namespace graphbal::kernels {

// pairwise_distances: row-major N x N euclidean distances of the rows of `x`.
// knn_brute_force: N x k neighbor indices, ascending by (distance, index).
namespace serial {
void pairwise_distances(const Matrix& x, std::span<double> out);
void knn_brute_force(const Matrix& x, int k, std::span<int> out);
}  // namespace serial

namespace omp {
void pairwise_distances(const Matrix& x, std::span<double> out);
void knn_brute_force(const Matrix& x, int k, std::span<int> out);
}  // namespace omp

/// Squared euclidean distance, summed in column order. Shared by the kd-tree
/// and brute-force searches so that ties resolve identically.
inline double squared_distance(const double* a, const double* b, Eigen::Index d) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < d; ++c) {
    const double diff = a[c] - b[c];
    acc += diff * diff;
  }
  return acc;
}

/// Number of worker threads OpenMP will use (1 without OpenMP).
int max_threads();

}  // namespace graphbal::kernels
