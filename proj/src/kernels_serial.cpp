#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "graphbal/kernels.hpp"

namespace graphbal::kernels {
namespace detail {

void distance_row(const Matrix& x, Eigen::Index i, std::span<double> out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double* xi = x.row(i).data();
  out[static_cast<std::size_t>(i * n + i)] = 0.0;
  for (Eigen::Index j = i + 1; j < n; ++j) {
    const double v = std::sqrt(squared_distance(xi, x.row(j).data(), d));
    out[static_cast<std::size_t>(i * n + j)] = v;
    out[static_cast<std::size_t>(j * n + i)] = v;
  }
}

void knn_row(const Matrix& x, Eigen::Index i, int k, std::vector<std::pair<double, int>>& scratch,
             std::span<int> out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double* xi = x.row(i).data();
  scratch.clear();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    scratch.emplace_back(squared_distance(xi, x.row(j).data(), d), static_cast<int>(j));
  }
  std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end());
  for (int t = 0; t < k; ++t) out[static_cast<std::size_t>(i * k + t)] = scratch[t].second;
}

}  // namespace detail

namespace serial {

void pairwise_distances(const Matrix& x, std::span<double> out) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) detail::distance_row(x, i, out);
}

void knn_brute_force(const Matrix& x, int k, std::span<int> out) {
  std::vector<std::pair<double, int>> scratch;
  scratch.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) detail::knn_row(x, i, k, scratch, out);
}

}  // namespace serial
}  // namespace graphbal::kernels
