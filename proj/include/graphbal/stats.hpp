#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "graphbal/core.hpp"
#include "graphbal/nngraph.hpp"
#include "graphbal/numerics.hpp"
#include "graphbal/paths.hpp"

namespace graphbal {

enum class StatisticKind { runs, ranks_kw, crossmatch_pairs, knn_counts };

std::string to_string(StatisticKind kind);

/// Statistic vector: G entries for runs and knn_counts, one for ranks_kw,
/// G(G-1)/2 for crossmatch_pairs in lexicographic (g, h) order.
struct StatVector {
  StatisticKind kind = StatisticKind::knn_counts;
  Vector values;
};

struct MomentSet {
  Vector mean;
  SquareMatrix covariance;
  SquareMatrix correlation;
};

/// Permutation-null moments of the kNN within-group counts.
struct KnnMoments {
  Vector expectation;
  SquareMatrix covariance;
  SquareMatrix correlation_hat;
  double j_over_n = 0.0;  // 2J / N
  double s_over_n = 0.0;  // 2S / N
};

/// C_g: directed kNN edges whose endpoints both belong to group g.
StatVector knn_counts(const KnnGraph& graph, std::span<const int> labels, int groups);

/// Exact permutation moments of C under a fixed graph. Throws DegenerateError
/// when a group has fewer than two units or N < 4.
KnnMoments knn_moments(int n, std::span<const int> group_sizes, int k,
                       const GraphFunctionals& functionals);

struct Standardized {
  Vector u;
  SquareMatrix omega;
};

/// U_g = (C_g - 0.5 - E C_g) / sd(C_g).
Standardized knn_standardize(const StatVector& counts, const KnnMoments& moments);

/// R_g: maximal blocks of consecutive group-g units along the path.
StatVector run_counts(const Path& path, std::span<const int> labels, int groups);

/// Exact permutation mean and covariance of the run counts.
MomentSet run_moments(int n, std::span<const int> group_sizes);

struct KruskalWallis {
  double h = 0.0;
  int dof = 0;
};

/// Kruskal-Wallis H on path positions 1..N (no ties, so no tie correction).
KruskalWallis kw_rank_statistic(const Path& path, std::span<const int> labels, int groups);

/// A_gh: matched pairs joining group g and group h, g < h.
StatVector crossmatch_counts(const Matching& matching, std::span<const int> labels, int groups);

/// Per-group totals sum_{h != g} A_gh from the pairwise vector.
Vector crossmatch_group_totals(const StatVector& pairs, int groups);

/// Correlation matrix of a covariance matrix. Rows with zero variance get a
/// unit diagonal and zero off-diagonal entries.
SquareMatrix covariance_to_correlation(const SquareMatrix& covariance);

// Permutation null ----------------------------------------------------------

enum class NullMode { exhaustive, monte_carlo };

/// The fixed structure a statistic is computed on while labels permute.
using GraphRef = std::variant<std::reference_wrapper<const KnnGraph>,
                              std::reference_wrapper<const Path>,
                              std::reference_wrapper<const Matching>>;

/// Maps a labeling to the statistic vector.
using LabelStatistic = std::function<Vector(std::span<const int> labels)>;

LabelStatistic make_label_statistic(StatisticKind kind, GraphRef graph, int groups);

/// Largest number of distinct labelings enumerated in exhaustive mode.
inline constexpr double kExhaustiveCap = 1e6;

/// N! / (n_1! ... n_G!) as a double.
double multinomial_count(std::span<const int> group_sizes);

struct PermutationNull {
  NullMode mode = NullMode::monte_carlo;
  long long draws = 0;
  Vector empirical_mean;
  SquareMatrix empirical_cov;  // population (1/draws) covariance
  Matrix samples;              // draws x m

  /// Probability that score(S*) >= observed under the stored distribution.
  /// Exhaustive mode returns the exact tail mass; Monte Carlo mode
  /// (1 + hits) / (1 + draws).
  double upper_tail(const std::function<double(std::span<const double>)>& score,
                    double observed) const;
};

/// Permutes labels with the structure held fixed. Monte Carlo draw r uses
/// the sub-stream rng.derive(r), so results do not depend on thread count.
PermutationNull permutation_null(const LabelStatistic& statistic, std::span<const int> group_sizes,
                                 NullMode mode, long long draws, const RandomStream& rng,
                                 Execution exec = Execution::parallel);

PermutationNull permutation_null(StatisticKind kind, GraphRef graph,
                                 std::span<const int> group_sizes, NullMode mode, long long draws,
                                 const RandomStream& rng, Execution exec = Execution::parallel);

}  // namespace graphbal
