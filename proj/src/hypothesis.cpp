#include "graphbal/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace graphbal {

std::string to_string(TestForm form) {
  switch (form) {
    case TestForm::wald:
      return "wald";
    case TestForm::max:
      return "max";
    case TestForm::min:
      return "min";
  }
  return "unknown";
}

std::string to_string(MomentSource source) {
  switch (source) {
    case MomentSource::analytic:
      return "analytic";
    case MomentSource::exhaustive:
      return "exhaustive";
    case MomentSource::monte_carlo:
      return "monte_carlo";
  }
  return "unknown";
}

TestForm test_form_from_string(const std::string& name) {
  if (name == "wald") return TestForm::wald;
  if (name == "max") return TestForm::max;
  if (name == "min") return TestForm::min;
  throw InputError("unknown test form '" + name + "'");
}

MomentSource moment_source_from_string(const std::string& name) {
  if (name == "analytic") return MomentSource::analytic;
  if (name == "exhaustive") return MomentSource::exhaustive;
  if (name == "monte_carlo") return MomentSource::monte_carlo;
  throw InputError("unknown moment source '" + name + "'");
}

StatisticKind statistic_kind_from_string(const std::string& name) {
  for (auto kind : {StatisticKind::runs, StatisticKind::ranks_kw, StatisticKind::crossmatch_pairs,
                    StatisticKind::knn_counts}) {
    if (to_string(kind) == name) return kind;
  }
  throw InputError("unknown statistic kind '" + name + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::knn:
      return "knn";
    case Method::crossmatch:
      return "crossmatch";
    case Method::runs:
      return "runs";
    case Method::ranks:
      return "ranks";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "knn") return Method::knn;
  if (name == "crossmatch") return Method::crossmatch;
  if (name == "runs") return Method::runs;
  if (name == "ranks") return Method::ranks;
  throw InputError("unknown method '" + name + "' (expected knn, crossmatch, runs or ranks)");
}

std::string to_string(FormRequest form) {
  switch (form) {
    case FormRequest::wald:
      return "wald";
    case FormRequest::extremum:
      return "extremum";
    case FormRequest::max:
      return "max";
    case FormRequest::min:
      return "min";
  }
  return "unknown";
}

FormRequest form_request_from_string(const std::string& name) {
  if (name == "wald") return FormRequest::wald;
  if (name == "extremum") return FormRequest::extremum;
  if (name == "max") return FormRequest::max;
  if (name == "min") return FormRequest::min;
  throw InputError("unknown form '" + name + "' (expected wald, extremum, max or min)");
}

FormRequest default_form(Method method) {
  return method == Method::runs ? FormRequest::extremum : FormRequest::wald;
}

int default_k(int n) { return std::max(1, n / 10); }

TestReport wald_test(const Vector& s, const Vector& mu, const SquareMatrix& sigma,
                     DofPolicy policy) {
  const Eigen::Index m = s.size();
  if (mu.size() != m || sigma.rows() != m || sigma.cols() != m) {
    throw InputError("wald_test: dimension mismatch");
  }
  const Vector diff = s - mu;
  const SolveResult solved = solve_spd_or_pinv(sigma, diff);
  int dof = 0;
  switch (policy) {
    case DofPolicy::full:
      dof = static_cast<int>(m);
      break;
    case DofPolicy::minus_one:
      dof = static_cast<int>(m) - 1;
      break;
    case DofPolicy::rank:
      dof = solved.rank;
      break;
  }
  if (dof < 1) throw DegenerateError("Wald test has zero degrees of freedom");
  TestReport out;
  out.test_form = TestForm::wald;
  out.t = std::max(0.0, diff.dot(solved.x));
  out.dof = dof;
  out.p_value = chi_square_sf(out.t, dof);
  out.statistic.assign(s.data(), s.data() + m);
  return out;
}

TestReport extremum_test(const Vector& u, const SquareMatrix& omega, Direction direction,
                         int n_mc, RandomStream& rng) {
  if (u.size() < 1 || omega.rows() != u.size()) throw InputError("extremum_test: dimension mismatch");
  TestReport out;
  out.test_form = direction == Direction::max ? TestForm::max : TestForm::min;
  out.t = direction == Direction::max ? u.maxCoeff() : u.minCoeff();
  const TailEstimate tail = mvn_extremum_sf(out.t, omega, direction, n_mc, rng);
  out.p_value = tail.p;
  out.mc_se = tail.mc_se;
  out.standardized = true;
  out.statistic.assign(u.data(), u.data() + u.size());
  return out;
}

namespace {

constexpr std::uint64_t kPermutationStream = 1;
constexpr std::uint64_t kGaussianStream = 2;

Direction resolve_direction(Method method, FormRequest form) {
  if (form == FormRequest::max) return Direction::max;
  if (form == FormRequest::min) return Direction::min;
  return method == Method::knn ? Direction::max : Direction::min;
}

// (S + shift - mean) / sd with shift = -0.5 for max and +0.5 for min.
Vector standardize(const Vector& s, const Vector& mean, const SquareMatrix& cov, double shift,
                   const char* what) {
  Vector u(s.size());
  for (Eigen::Index g = 0; g < s.size(); ++g) {
    const double var = cov(g, g);
    if (!(var > 0.0)) {
      throw DegenerateError(std::string(what) + " entry " + std::to_string(g + 1) +
                            " has zero null variance");
    }
    u(g) = (s(g) + shift - mean(g)) / std::sqrt(var);
  }
  return u;
}

Path build_path(const Matrix& scaled, const BalanceConfig& config, Execution exec) {
  if (config.path_variant == PathMethod::hilbert) return hilbert_path(scaled, config.hilbert_bits);
  const DistanceMatrix d = pairwise_distances(scaled, Metric::euclidean, exec);
  if (config.path_variant == PathMethod::exact) return exact_path(d);
  return greedy_path(d, config.path_variant);
}

TestReport extremum_from_moments(const Vector& s, const Vector& mean, const SquareMatrix& cov,
                                 Direction direction, const BalanceConfig& config,
                                 const char* what) {
  const double shift = direction == Direction::max ? -0.5 : 0.5;
  const Vector u = standardize(s, mean, cov, shift, what);
  RandomStream rng(config.seed, kGaussianStream);
  TestReport out = extremum_test(u, covariance_to_correlation(cov), direction, config.n_mc, rng);
  out.continuity_correction = shift;
  return out;
}

TestReport knn_report(const Matrix& scaled, const std::vector<int>& labels,
                      const std::vector<int>& sizes, FormRequest form, const BalanceConfig& config,
                      GraphMeta& meta) {
  const int n = static_cast<int>(labels.size());
  const int groups = static_cast<int>(sizes.size());
  const int k = config.k.value_or(default_k(n));
  meta.graph = "knn";
  meta.k = k;
  const KnnGraph graph = knn_graph(scaled, k, config.backend, config.exec);
  const StatVector counts = knn_counts(graph, labels, groups);
  const KnnMoments moments = knn_moments(n, sizes, k, graph_functionals(graph));
  TestReport out;
  if (form == FormRequest::wald) {
    const Standardized z = knn_standardize(counts, moments);
    out = wald_test(z.u, Vector::Zero(groups), z.omega, DofPolicy::full);
    out.continuity_correction = -0.5;
  } else {
    const Direction direction = resolve_direction(Method::knn, form);
    const double shift = direction == Direction::max ? -0.5 : 0.5;
    const Vector u = standardize(counts.values, moments.expectation, moments.covariance, shift,
                                 "kNN count");
    RandomStream rng(config.seed, kGaussianStream);
    out = extremum_test(u, moments.correlation_hat, direction, config.n_mc, rng);
    out.continuity_correction = shift;
  }
  out.standardized = true;
  out.statistic.assign(counts.values.data(), counts.values.data() + groups);
  out.moment_source = MomentSource::analytic;
  return out;
}

TestReport runs_report(const Matrix& scaled, const std::vector<int>& labels,
                       const std::vector<int>& sizes, FormRequest form, const BalanceConfig& config,
                       GraphMeta& meta) {
  const int n = static_cast<int>(labels.size());
  const int groups = static_cast<int>(sizes.size());
  meta.graph = "path";
  meta.path_method = to_string(config.path_variant);
  const Path path = build_path(scaled, config, config.exec);
  const StatVector runs = run_counts(path, labels, groups);
  const MomentSet moments = run_moments(n, sizes);
  TestReport out;
  if (form == FormRequest::wald) {
    out = wald_test(runs.values, moments.mean, moments.covariance, DofPolicy::rank);
  } else {
    out = extremum_from_moments(runs.values, moments.mean, moments.covariance,
                                resolve_direction(Method::runs, form), config, "run count");
  }
  out.statistic.assign(runs.values.data(), runs.values.data() + groups);
  out.moment_source = MomentSource::analytic;
  return out;
}

TestReport ranks_report(const Matrix& scaled, const std::vector<int>& labels, int groups,
                        const BalanceConfig& config, GraphMeta& meta) {
  meta.graph = "path";
  meta.path_method = to_string(config.path_variant);
  const Path path = build_path(scaled, config, config.exec);
  const KruskalWallis kw = kw_rank_statistic(path, labels, groups);
  TestReport out;
  out.test_form = TestForm::wald;
  out.t = kw.h;
  out.dof = kw.dof;
  out.p_value = chi_square_sf(kw.h, kw.dof);
  out.statistic = {kw.h};
  out.moment_source = MomentSource::analytic;
  return out;
}

TestReport crossmatch_report(const Matrix& scaled, const std::vector<int>& labels,
                             const std::vector<int>& sizes, FormRequest form,
                             const BalanceConfig& config, GraphMeta& meta) {
  const int n = static_cast<int>(labels.size());
  const int groups = static_cast<int>(sizes.size());
  meta.graph = "nbm";
  const Matching full = nbm_matching(pairwise_distances(scaled, Metric::euclidean, config.exec));
  meta.dropped_unit = full.dropped_unit;

  // Restrict to the matched units so the dropped unit's label is held fixed.
  Matching matched = full;
  std::vector<int> matched_labels = labels;
  std::vector<int> matched_sizes = sizes;
  if (full.dropped_unit) {
    const int drop = *full.dropped_unit;
    auto reindex = [drop](int v) { return v > drop ? v - 1 : v; };
    for (auto& [a, b] : matched.pairs) {
      a = reindex(a);
      b = reindex(b);
    }
    matched.dropped_unit.reset();
    matched.size = n - 1;
    matched_labels.erase(matched_labels.begin() + drop);
    --matched_sizes[labels[drop] - 1];
  }
  for (int g = 0; g < groups; ++g) {
    if (matched_sizes[g] < 1) {
      throw DegenerateError("group " + std::to_string(g + 1) + " has no matched units");
    }
  }

  const StatVector pairs = crossmatch_counts(matched, matched_labels, groups);
  const bool exhaustive = multinomial_count(matched_sizes) <=
                          std::min(kExhaustiveCap, static_cast<double>(config.permutation_draws));
  const PermutationNull null =
      permutation_null(StatisticKind::crossmatch_pairs, std::cref(matched), matched_sizes,
                       exhaustive ? NullMode::exhaustive : NullMode::monte_carlo,
                       config.permutation_draws, RandomStream(config.seed, kPermutationStream),
                       config.exec);
  TestReport out;
  if (form == FormRequest::wald) {
    out = wald_test(pairs.values, null.empirical_mean, null.empirical_cov, DofPolicy::rank);
  } else {
    out = extremum_from_moments(pairs.values, null.empirical_mean, null.empirical_cov,
                                resolve_direction(Method::crossmatch, form), config,
                                "crossmatch pair count");
  }
  out.statistic.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
  out.moment_source = exhaustive ? MomentSource::exhaustive : MomentSource::monte_carlo;
  return out;
}

}  // namespace

TestReport balance_test(const Dataset& dataset, Method method, FormRequest form,
                        const BalanceConfig& config) {
  const int groups = dataset.num_groups();
  if (groups < 2) throw ConfigurationError("balance tests need at least two groups");
  if (method == Method::ranks && form != FormRequest::wald) {
    throw ConfigurationError("the ranks method supports only the wald form");
  }
  const Matrix scaled = apply_metric_scaling(dataset.data(), config.metric);
  const std::vector<int>& labels = dataset.labels();
  const std::vector<int>& sizes = dataset.group_sizes();

  GraphMeta meta;
  meta.n = dataset.size();
  meta.group_sizes = sizes;
  meta.seed = config.seed;
  meta.metric = to_string(config.metric);

  TestReport out;
  switch (method) {
    case Method::knn:
      out = knn_report(scaled, labels, sizes, form, config, meta);
      out.statistic_kind = StatisticKind::knn_counts;
      break;
    case Method::runs:
      out = runs_report(scaled, labels, sizes, form, config, meta);
      out.statistic_kind = StatisticKind::runs;
      break;
    case Method::ranks:
      out = ranks_report(scaled, labels, groups, config, meta);
      out.statistic_kind = StatisticKind::ranks_kw;
      break;
    case Method::crossmatch:
      out = crossmatch_report(scaled, labels, sizes, form, config, meta);
      out.statistic_kind = StatisticKind::crossmatch_pairs;
      break;
  }
  out.graph_meta = std::move(meta);
  return out;
}

}  // namespace graphbal
