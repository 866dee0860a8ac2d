#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace graphbal {

/// Row-major covariate matrix: one row per unit, one column per covariate.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using SquareMatrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Labels or schemas that violate a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Problem size beyond what an exact method supports.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Invalid combination of test options.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A statistic that is undefined for the given group structure
/// (zero variance, zero degrees of freedom).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Selects between the serial reference kernels and the OpenMP kernels.
/// Both produce bit-identical results.
enum class Execution { serial, parallel };

enum class Metric { euclidean, standardized_euclidean };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

struct GroupSummary {
  int groups = 0;
  std::vector<int> sizes;
};

/// Counts group sizes for labels in 1..G. Throws ValidationError on a
/// non-positive label or an empty group inside 1..max(label).
GroupSummary group_summary(std::span<const int> labels);

/// Covariates of N units together with their treatment labels (1..G).
class Dataset {
 public:
  Dataset(Matrix data, std::vector<int> labels);

  const Matrix& data() const { return data_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& group_sizes() const { return group_sizes_; }
  int size() const { return static_cast<int>(labels_.size()); }
  int dims() const { return static_cast<int>(data_.cols()); }
  int num_groups() const { return static_cast<int>(group_sizes_.size()); }

 private:
  Matrix data_;
  std::vector<int> labels_;
  std::vector<int> group_sizes_;
};

/// Dense symmetric N x N distance matrix with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  /// Takes ownership of row-major entries; validates symmetry,
  /// nonnegativity and the zero diagonal.
  DistanceMatrix(int n, std::vector<double> entries);

  int size() const { return n_; }
  double operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }
  std::span<const double> row(int i) const {
    return {entries_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }
  const std::vector<double>& entries() const { return entries_; }
  double max_entry() const;

 private:
  int n_ = 0;
  std::vector<double> entries_;
};

/// Applies the column scaling implied by the metric. Euclidean returns the
/// data unchanged; standardized_euclidean divides each column by its sample
/// standard deviation and throws InputError naming a zero-variance column.
Matrix apply_metric_scaling(const Matrix& data, Metric metric);

DistanceMatrix pairwise_distances(const Matrix& data, Metric metric = Metric::euclidean,
                                  Execution exec = Execution::parallel);

}  // namespace graphbal
