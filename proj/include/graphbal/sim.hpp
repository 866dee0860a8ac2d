#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "graphbal/core.hpp"
#include "graphbal/hypothesis.hpp"
#include "graphbal/numerics.hpp"

namespace graphbal {

enum class ScenarioKind { null, location, scale, correlation, motivating };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::null;
  double delta = 0.0;
  int d = 10;
  int groups = 3;
  std::vector<int> sizes;  // empty means n_g = 50 g
  int motivating_n = 150;  // used by the motivating kind only
  int replicates = 200;
  std::uint64_t seed = 1;
  std::string name;  // optional label for power tables
};

/// Group sizes implied by the config (explicit sizes or 50 g).
std::vector<int> scenario_sizes(const ScenarioConfig& config);

/// Checks the invariants of a Gaussian scenario; throws ConfigurationError.
void validate_scenario(const ScenarioConfig& config);

/// Gaussian scenario draw for one replicate. Group g gets n_g rows from
/// N(mu_g, Sigma_g):
///   location     mu_g = (g-1) delta 1, Sigma_g = I
///   scale        mu_g = 0, Sigma_g = (1 + (g-1) delta) I
///   correlation  mu_g = 0, Sigma_g equicorrelated with rho_g = (g-1) delta / (G-1)
///   null         mu_g = 0, Sigma_g = I
/// Rows are generated group by group from the stream (seed, 0) derived by
/// the replicate index, so delta = 0 yields the same data for every kind.
Dataset gen_gaussian_scenario(const ScenarioConfig& config, std::uint64_t replicate_index);

/// Treatment probabilities of the three-arm motivating example at (x1, x2).
std::array<double, 3> motivating_probabilities(double x1, double x2);

struct MotivatingDraw {
  Dataset dataset;  // columns x1, x2
  int regenerations = 0;
};

/// N units with x1, x2 iid N(0, 1) and a treatment drawn from
/// motivating_probabilities. Redraws when an arm is empty, at most 100 times.
MotivatingDraw gen_motivating(int n, std::uint64_t replicate_index, std::uint64_t seed);

struct CovariateFunction {
  std::string name;
  std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>&)> apply;
};

/// The functions x1, x2, x1^2, x2^2 and x1 x2 of the first two columns.
std::vector<CovariateFunction> default_covariate_functions();

struct DiagnosticRow {
  std::string name;
  double std_diff = 0.0;  // (1/G) sum_g |mean_g - mean| / sd
  double f_statistic = 0.0;
  double f_p_value = 1.0;
};

/// Per function: average absolute standardized mean difference and the
/// one-way ANOVA F test with (G - 1, N - G) dof. The sd is the pooled
/// sample sd of all units. Throws DegenerateError on zero variance.
std::vector<DiagnosticRow> univariate_diagnostics(const Dataset& dataset,
                                                  const std::vector<CovariateFunction>& functions);

struct TestSpec {
  Method method = Method::knn;
  FormRequest form = FormRequest::wald;
  std::optional<int> k;
  std::optional<PathMethod> path;

  /// Form after resolving `extremum` to the method's direction.
  std::string form_name() const;
};

struct PowerRow {
  std::string scenario;
  ScenarioKind kind = ScenarioKind::null;
  double delta = 0.0;
  int d = 0;
  int groups = 0;
  std::string method;
  std::string form;
  int replicates = 0;
  int rejections = 0;
  int failures = 0;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
  std::uint64_t seed = 0;
  std::string error;  // first failure message, empty when none
};

struct PowerTable {
  std::vector<PowerRow> rows;
};

struct PowerOptions {
  double alpha = 0.05;
  int n_mc = 100000;
  long long permutation_draws = 10000;
  Metric metric = Metric::euclidean;
  Execution exec = Execution::parallel;
};

/// Runs every test on `replicates` draws of every scenario in `grid`.
///
/// Scenario data depend only on (seed, replicate), so all cells share common
/// random numbers. Test randomness uses a stream keyed by (cell, replicate,
/// test). Replicates run in parallel; rows come out in (cell, test) order.
/// A test that throws is counted in `failures` and never rejects.
PowerTable power_study(const std::vector<ScenarioConfig>& grid, const std::vector<TestSpec>& tests,
                       int replicates, std::uint64_t seed, const PowerOptions& options = {});

/// Default scenario label, e.g. "scale_d10_G5_delta0.3".
std::string scenario_label(const ScenarioConfig& config);

}  // namespace graphbal
