#include <utility>
#include <vector>

#include <omp.h>

#include "graphbal/kernels.hpp"

namespace graphbal::kernels {
namespace detail {
void distance_row(const Matrix& x, Eigen::Index i, std::span<double> out);
void knn_row(const Matrix& x, Eigen::Index i, int k, std::vector<std::pair<double, int>>& scratch,
             std::span<int> out);
}  // namespace detail

int max_threads() { return omp_get_max_threads(); }

namespace omp {

void pairwise_distances(const Matrix& x, std::span<double> out) {
  const Eigen::Index n = x.rows();
  // Row i writes (i, j) and (j, i) for j > i only, so rows never collide.
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i) detail::distance_row(x, i, out);
}

void knn_brute_force(const Matrix& x, int k, std::span<int> out) {
  const Eigen::Index n = x.rows();
#pragma omp parallel
  {
    std::vector<std::pair<double, int>> scratch;
    scratch.reserve(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) detail::knn_row(x, i, k, scratch, out);
  }
}

}  // namespace omp
}  // namespace graphbal::kernels
