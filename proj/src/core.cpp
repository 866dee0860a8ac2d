#include "graphbal/core.hpp"

#include <cmath>
#include <string>

#include "graphbal/kernels.hpp"

namespace graphbal {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::euclidean:
      return "euclidean";
    case Metric::standardized_euclidean:
      return "standardized_euclidean";
  }
  return "unknown";
}

Metric metric_from_string(const std::string& name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "standardized_euclidean" || name == "standardized") {
    return Metric::standardized_euclidean;
  }
  throw InputError("unknown metric '" + name + "'");
}

GroupSummary group_summary(std::span<const int> labels) {
  if (labels.empty()) throw ValidationError("label vector is empty");
  int max_label = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1) {
      throw ValidationError("label at unit " + std::to_string(i) + " is " +
                            std::to_string(labels[i]) + "; labels must be positive");
    }
    max_label = std::max(max_label, labels[i]);
  }
  GroupSummary out;
  out.groups = max_label;
  out.sizes.assign(static_cast<std::size_t>(max_label), 0);
  for (int label : labels) ++out.sizes[static_cast<std::size_t>(label - 1)];
  for (int g = 0; g < max_label; ++g) {
    if (out.sizes[static_cast<std::size_t>(g)] == 0) {
      throw ValidationError("group " + std::to_string(g + 1) + " is empty");
    }
  }
  return out;
}

Dataset::Dataset(Matrix data, std::vector<int> labels)
    : data_(std::move(data)), labels_(std::move(labels)) {
  if (data_.rows() != static_cast<Eigen::Index>(labels_.size())) {
    throw InputError("dataset has " + std::to_string(data_.rows()) + " rows but " +
                     std::to_string(labels_.size()) + " labels");
  }
  group_sizes_ = group_summary(labels_).sizes;
}

DistanceMatrix::DistanceMatrix(int n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n < 0 || entries_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw InputError("distance matrix entries do not form an N x N matrix");
  }
  for (int i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) {
      throw InputError("distance matrix diagonal entry " + std::to_string(i) + " is not zero");
    }
    for (int j = i + 1; j < n_; ++j) {
      const double a = (*this)(i, j);
      if (!(a >= 0.0) || a != (*this)(j, i)) {
        throw InputError("distance matrix is not symmetric and nonnegative at (" +
                         std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

double DistanceMatrix::max_entry() const {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, v);
  return m;
}

Matrix apply_metric_scaling(const Matrix& data, Metric metric) {
  if (metric == Metric::euclidean) return data;
  const Eigen::Index n = data.rows();
  if (n < 2) throw InputError("standardized_euclidean needs at least two rows");
  Matrix scaled = data;
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    const double mean = data.col(c).mean();
    const double ss = (data.col(c).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw InputError("column " + std::to_string(c) +
                       " has zero variance; standardized_euclidean is undefined");
    }
    scaled.col(c) /= sd;
  }
  return scaled;
}

DistanceMatrix pairwise_distances(const Matrix& data, Metric metric, Execution exec) {
  const Eigen::Index n = data.rows();
  if (n < 2) throw InputError("pairwise_distances needs N >= 2");
  if (data.cols() < 1) throw InputError("pairwise_distances needs d >= 1");
  const Matrix x = apply_metric_scaling(data, metric);
  std::vector<double> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  if (exec == Execution::serial) {
    kernels::serial::pairwise_distances(x, out);
  } else {
    kernels::omp::pairwise_distances(x, out);
  }
  return DistanceMatrix(static_cast<int>(n), std::move(out));
}

}  // namespace graphbal
