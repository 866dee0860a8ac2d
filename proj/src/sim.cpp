#include "graphbal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace graphbal {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::null:
      return "null";
    case ScenarioKind::location:
      return "location";
    case ScenarioKind::scale:
      return "scale";
    case ScenarioKind::correlation:
      return "correlation";
    case ScenarioKind::motivating:
      return "motivating";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (auto kind : {ScenarioKind::null, ScenarioKind::location, ScenarioKind::scale,
                    ScenarioKind::correlation, ScenarioKind::motivating}) {
    if (to_string(kind) == name) return kind;
  }
  throw InputError("unknown scenario kind '" + name + "'");
}

std::vector<int> scenario_sizes(const ScenarioConfig& config) {
  if (!config.sizes.empty()) return config.sizes;
  std::vector<int> sizes(static_cast<std::size_t>(std::max(config.groups, 0)));
  for (int g = 0; g < config.groups; ++g) sizes[g] = 50 * (g + 1);
  return sizes;
}

void validate_scenario(const ScenarioConfig& config) {
  if (config.kind == ScenarioKind::motivating) {
    if (config.motivating_n < 3) throw ConfigurationError("motivating scenario needs N >= 3");
    return;
  }
  if (config.d < 1) throw ConfigurationError("scenario dimension must be at least 1");
  if (config.groups < 1) throw ConfigurationError("scenario needs at least one group");
  const std::vector<int> sizes = scenario_sizes(config);
  if (static_cast<int>(sizes.size()) != config.groups) {
    throw ConfigurationError("scenario lists " + std::to_string(sizes.size()) + " sizes for " +
                             std::to_string(config.groups) + " groups");
  }
  for (int n : sizes) {
    if (n < 2) throw ConfigurationError("scenario group sizes must be at least 2");
  }
  if (!std::isfinite(config.delta)) throw ConfigurationError("delta must be finite");
  if (config.kind == ScenarioKind::scale && 1.0 + (config.groups - 1) * config.delta <= 0.0) {
    throw ConfigurationError("scale delta makes a group variance nonpositive");
  }
  if (config.kind == ScenarioKind::correlation && (config.delta < 0.0 || config.delta >= 1.0)) {
    throw ConfigurationError("correlation delta must lie in [0, 1)");
  }
}

namespace {

constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kTestStream = 3;

// Square-root factor of Sigma_g for the scenario.
SquareMatrix group_factor(const ScenarioConfig& config, int g) {
  const int d = config.d;
  switch (config.kind) {
    case ScenarioKind::scale:
      return std::sqrt(1.0 + g * config.delta) * SquareMatrix::Identity(d, d);
    case ScenarioKind::correlation: {
      const double rho = config.groups > 1 ? g * config.delta / (config.groups - 1) : 0.0;
      SquareMatrix sigma = SquareMatrix::Constant(d, d, rho);
      sigma.diagonal().setOnes();
      Eigen::LLT<SquareMatrix> llt(sigma);
      if (llt.info() != Eigen::Success) {
        throw ConfigurationError("correlation scenario covariance is not positive definite");
      }
      return llt.matrixL();
    }
    default:
      return SquareMatrix::Identity(d, d);
  }
}

}  // namespace

Dataset gen_gaussian_scenario(const ScenarioConfig& config, std::uint64_t replicate_index) {
  if (config.kind == ScenarioKind::motivating) {
    return gen_motivating(config.motivating_n, replicate_index, config.seed).dataset;
  }
  validate_scenario(config);
  const std::vector<int> sizes = scenario_sizes(config);
  int n = 0;
  for (int s : sizes) n += s;
  Matrix data(n, config.d);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  RandomStream rng = RandomStream(config.seed, kDataStream).derive(replicate_index);
  int row = 0;
  for (int g = 0; g < config.groups; ++g) {
    const Vector mean = config.kind == ScenarioKind::location
                            ? Vector::Constant(config.d, g * config.delta)
                            : Vector::Zero(config.d);
    const SquareMatrix factor = group_factor(config, g);
    for (int i = 0; i < sizes[g]; ++i, ++row) {
      data.row(row) = gaussian_vector(rng, mean, factor).transpose();
      labels.push_back(g + 1);
    }
  }
  return Dataset(std::move(data), std::move(labels));
}

std::array<double, 3> motivating_probabilities(double x1, double x2) {
  const std::array<double, 3> eta = {
      0.1 * x1 - 0.1 * x2 - x1 * x2,
      -0.2 * x1 + 0.2 * x2 + 0.5 * x1 * x1,
      -0.1 * x1 + 0.2 * x2 - 2.0 * x1 * x2,
  };
  const double top = std::max({eta[0], eta[1], eta[2]});
  std::array<double, 3> p{};
  double total = 0.0;
  for (int j = 0; j < 3; ++j) total += p[j] = std::exp(eta[j] - top);
  for (double& v : p) v /= total;
  return p;
}

MotivatingDraw gen_motivating(int n, std::uint64_t replicate_index, std::uint64_t seed) {
  if (n < 3) throw InputError("motivating example needs N >= 3");
  constexpr int kMaxRegenerations = 100;
  RandomStream rng = RandomStream(seed, kDataStream).derive(replicate_index);
  for (int attempt = 0; attempt <= kMaxRegenerations; ++attempt) {
    Matrix data(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::array<int, 3> counts{};
    for (int i = 0; i < n; ++i) {
      const double x1 = rng.normal();
      const double x2 = rng.normal();
      data(i, 0) = x1;
      data(i, 1) = x2;
      const auto p = motivating_probabilities(x1, x2);
      const double u = rng.uniform();
      const int z = u < p[0] ? 1 : (u < p[0] + p[1] ? 2 : 3);
      labels[i] = z;
      ++counts[z - 1];
    }
    if (counts[0] > 0 && counts[1] > 0 && counts[2] > 0) {
      return {Dataset(std::move(data), std::move(labels)), attempt};
    }
  }
  throw DegenerateError("motivating example left an arm empty after 100 regenerations");
}

std::vector<CovariateFunction> default_covariate_functions() {
  using Row = Eigen::Ref<const Eigen::RowVectorXd>;
  return {
      {"x1", [](const Row& x) { return x(0); }},
      {"x2", [](const Row& x) { return x(1); }},
      {"x1^2", [](const Row& x) { return x(0) * x(0); }},
      {"x2^2", [](const Row& x) { return x(1) * x(1); }},
      {"x1*x2", [](const Row& x) { return x(0) * x(1); }},
  };
}

std::vector<DiagnosticRow> univariate_diagnostics(const Dataset& dataset,
                                                  const std::vector<CovariateFunction>& functions) {
  const int n = dataset.size();
  const int groups = dataset.num_groups();
  if (groups < 2 || n <= groups) {
    throw InputError("univariate diagnostics need G >= 2 and N > G");
  }
  const auto& labels = dataset.labels();
  const auto& sizes = dataset.group_sizes();
  std::vector<DiagnosticRow> out;
  out.reserve(functions.size());
  Vector values(n);
  for (const auto& fn : functions) {
    for (int i = 0; i < n; ++i) values(i) = fn.apply(dataset.data().row(i));
    const double grand = values.mean();
    const double var = (values.array() - grand).square().sum() / (n - 1);
    if (!(var > 0.0)) throw DegenerateError("covariate function " + fn.name + " has zero variance");
    const double sd = std::sqrt(var);

    Vector group_mean = Vector::Zero(groups);
    for (int i = 0; i < n; ++i) group_mean(labels[i] - 1) += values(i);
    for (int g = 0; g < groups; ++g) group_mean(g) /= sizes[g];
    double within = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dev = values(i) - group_mean(labels[i] - 1);
      within += dev * dev;
    }
    double between = 0.0;
    double diff = 0.0;
    for (int g = 0; g < groups; ++g) {
      const double dev = group_mean(g) - grand;
      between += sizes[g] * dev * dev;
      diff += std::abs(dev) / sd;
    }

    DiagnosticRow row;
    row.name = fn.name;
    row.std_diff = diff / groups;
    const double ms_between = between / (groups - 1);
    const double ms_within = within / (n - groups);
    if (ms_within > 0.0) {
      row.f_statistic = ms_between / ms_within;
      row.f_p_value = f_sf(row.f_statistic, groups - 1, n - groups);
    } else {
      row.f_statistic = ms_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      row.f_p_value = ms_between > 0.0 ? 0.0 : 1.0;
    }
    out.push_back(row);
  }
  return out;
}

std::string TestSpec::form_name() const {
  if (form != FormRequest::extremum) return to_string(form);
  return method == Method::knn ? "max" : "min";
}

std::string scenario_label(const ScenarioConfig& config) {
  if (!config.name.empty()) return config.name;
  std::ostringstream os;
  if (config.kind == ScenarioKind::motivating) {
    os << "motivating_N" << config.motivating_n;
  } else {
    os << to_string(config.kind) << "_d" << config.d << "_G" << config.groups << "_delta"
       << config.delta;
  }
  return os.str();
}

PowerTable power_study(const std::vector<ScenarioConfig>& grid, const std::vector<TestSpec>& tests,
                       int replicates, std::uint64_t seed, const PowerOptions& options) {
  if (replicates < 1) throw InputError("power_study needs at least one replicate");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  for (const auto& cell : grid) validate_scenario(cell);

  const std::size_t n_tests = tests.size();
  PowerTable table;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    ScenarioConfig cell = grid[c];
    cell.seed = seed;
    cell.replicates = replicates;

    // outcome[r * n_tests + t]: 1 reject, 0 accept, -1 failure.
    std::vector<int> outcome(static_cast<std::size_t>(replicates) * n_tests, 0);
    std::vector<std::string> message(outcome.size());
    const bool parallel = options.exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int r = 0; r < replicates; ++r) {
      const RandomStream test_root =
          RandomStream(seed, kTestStream).derive(c).derive(static_cast<std::uint64_t>(r));
      std::optional<Dataset> data;
      std::string data_error;
      try {
        data = gen_gaussian_scenario(cell, static_cast<std::uint64_t>(r));
      } catch (const std::exception& e) {
        data_error = e.what();
      }
      for (std::size_t t = 0; t < n_tests; ++t) {
        const std::size_t slot = static_cast<std::size_t>(r) * n_tests + t;
        if (!data) {
          outcome[slot] = -1;
          message[slot] = data_error;
          continue;
        }
        BalanceConfig config;
        config.k = tests[t].k;
        if (tests[t].path) config.path_variant = *tests[t].path;
        config.metric = options.metric;
        config.n_mc = options.n_mc;
        config.permutation_draws = options.permutation_draws;
        RandomStream test_stream = test_root.derive(t);
        config.seed = test_stream();
        config.exec = Execution::serial;
        try {
          const TestReport report = balance_test(*data, tests[t].method, tests[t].form, config);
          outcome[slot] = report.p_value <= options.alpha ? 1 : 0;
        } catch (const std::exception& e) {
          outcome[slot] = -1;
          message[slot] = e.what();
        }
      }
    }

    for (std::size_t t = 0; t < n_tests; ++t) {
      PowerRow row;
      row.scenario = scenario_label(cell);
      row.kind = cell.kind;
      row.delta = cell.delta;
      row.d = cell.kind == ScenarioKind::motivating ? 2 : cell.d;
      row.groups = cell.kind == ScenarioKind::motivating ? 3 : cell.groups;
      row.method = to_string(tests[t].method);
      if (tests[t].method != Method::knn && tests[t].path &&
          *tests[t].path != PathMethod::greedy_edge && tests[t].method != Method::crossmatch) {
        row.method += "@" + to_string(*tests[t].path);
      }
      if (tests[t].method == Method::knn && tests[t].k) row.method += "@k" + std::to_string(*tests[t].k);
      row.form = tests[t].form_name();
      row.replicates = replicates;
      row.seed = seed;
      for (int r = 0; r < replicates; ++r) {
        const std::size_t slot = static_cast<std::size_t>(r) * n_tests + t;
        if (outcome[slot] == 1) ++row.rejections;
        if (outcome[slot] == -1) {
          if (row.failures == 0) row.error = message[slot];
          ++row.failures;
        }
      }
      row.rejection_rate = static_cast<double>(row.rejections) / replicates;
      row.mc_se = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) / replicates);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace graphbal
