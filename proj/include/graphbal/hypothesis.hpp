#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphbal/core.hpp"
#include "graphbal/nngraph.hpp"
#include "graphbal/numerics.hpp"
#include "graphbal/paths.hpp"
#include "graphbal/stats.hpp"

namespace graphbal {

enum class TestForm { wald, max, min };
enum class DofPolicy { full, minus_one, rank };
enum class MomentSource { analytic, exhaustive, monte_carlo };

std::string to_string(TestForm form);
std::string to_string(MomentSource source);
TestForm test_form_from_string(const std::string& name);
MomentSource moment_source_from_string(const std::string& name);
StatisticKind statistic_kind_from_string(const std::string& name);

/// How the fixed structure behind a statistic was built.
struct GraphMeta {
  std::string graph;                       // knn, nbm or path
  std::optional<std::string> path_method;  // set for path-based statistics
  std::optional<int> k;
  int n = 0;
  std::vector<int> group_sizes;
  std::uint64_t seed = 0;
  std::optional<int> dropped_unit;
  std::string metric = "euclidean";

  friend bool operator==(const GraphMeta&, const GraphMeta&) = default;
};

struct TestReport {
  StatisticKind statistic_kind = StatisticKind::knn_counts;
  TestForm test_form = TestForm::wald;
  double t = 0.0;
  std::optional<int> dof;  // present iff test_form == wald
  double p_value = 1.0;
  std::optional<double> mc_se;
  GraphMeta graph_meta;
  MomentSource moment_source = MomentSource::analytic;
  std::vector<double> statistic;  // raw S before centering
  bool standardized = false;      // extremum forms act on standardized entries
  double continuity_correction = 0.0;
  std::vector<std::string> group_labels;  // original label of group g, when known

  friend bool operator==(const TestReport&, const TestReport&) = default;
};

/// T = (S - mu)^T Sigma^+ (S - mu) referred to chi-square with the dof chosen
/// by `policy`. Throws DegenerateError when the dof is zero.
TestReport wald_test(const Vector& s, const Vector& mu, const SquareMatrix& sigma,
                     DofPolicy policy);

/// T = max(U) or min(U) with a Monte Carlo tail probability under N(0, Omega).
TestReport extremum_test(const Vector& u, const SquareMatrix& omega, Direction direction,
                         int n_mc, RandomStream& rng);

enum class Method { knn, crossmatch, runs, ranks };
std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// `extremum` resolves to max for knn and min for runs and crossmatch.
enum class FormRequest { wald, extremum, max, min };
std::string to_string(FormRequest form);
FormRequest form_request_from_string(const std::string& name);

/// wald for knn, crossmatch and ranks; extremum for runs.
FormRequest default_form(Method method);

struct BalanceConfig {
  std::optional<int> k;  // default floor(0.1 N), at least 1
  PathMethod path_variant = PathMethod::greedy_edge;
  Metric metric = Metric::euclidean;
  int n_mc = 100000;
  long long permutation_draws = 10000;
  std::uint64_t seed = 1;
  KnnBackend backend = KnnBackend::kd_tree;
  int hilbert_bits = 10;
  Execution exec = Execution::parallel;
};

/// Builds the graph or path for `method`, computes its statistic and null
/// moments, and returns the p-value of the requested form.
///
/// Extremum forms standardize each entry and shift the count by 0.5 toward
/// its null mean in the tested direction before taking max or min. kNN Wald
/// uses the corrected U with the finite-sample correlation and G dof; runs
/// and crossmatch Wald use the raw vector and the numerical rank of the null
/// covariance; ranks uses Kruskal-Wallis with G - 1 dof.
///
/// Crossmatch moments are estimated by permuting labels over the matched
/// units (exhaustively when the labelings fit within the draw budget).
/// Random streams: (seed, 1) for permutation draws, (seed, 2) for the
/// Gaussian tail estimate.
TestReport balance_test(const Dataset& dataset, Method method, FormRequest form,
                        const BalanceConfig& config = {});

/// k used by balance_test when none is configured.
int default_k(int n);

}  // namespace graphbal
