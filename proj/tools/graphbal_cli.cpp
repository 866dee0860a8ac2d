// graphbal: covariate balance tests on kNN graphs, matchings and Hamiltonian paths.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphbal/core.hpp"
#include "graphbal/hypothesis.hpp"
#include "graphbal/io.hpp"
#include "graphbal/nngraph.hpp"
#include "graphbal/paths.hpp"
#include "graphbal/sim.hpp"
#include "graphbal/stats.hpp"

namespace gb = graphbal;

namespace {

struct InputOptions {
  std::string path;
  std::string group_column = "group";
  std::vector<std::string> covariates;
  std::vector<std::string> jitter;
  char delimiter = ',';
};

struct GraphOptions {
  std::string method = "knn";
  std::optional<int> k;
  std::string metric = "euclidean";
  std::string path_variant = "greedy_edge";
  int hilbert_bits = 10;
  std::string backend = "kd_tree";
};

std::uint64_t seed_value = 1;
std::string output_path;

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input,-i", in.path, "CSV file with covariates and a group column")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--group-column", in.group_column, "Name of the treatment column")
      ->capture_default_str();
  cmd->add_option("--covariates", in.covariates, "Covariate columns (default: all others)")
      ->delimiter(',');
  cmd->add_option("--jitter", in.jitter,
                  "Column to jitter, optionally NAME=SCALE (default scale 1e-6 x range)");
  cmd->add_option("--delimiter", in.delimiter, "Field delimiter")->capture_default_str();
}

void add_graph_options(CLI::App* cmd, GraphOptions& g) {
  cmd->add_option("--k", g.k, "Neighbors per unit (default floor(0.1 N))")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--metric", g.metric, "euclidean | standardized_euclidean")
      ->check(CLI::IsMember({"euclidean", "standardized_euclidean"}))
      ->capture_default_str();
  cmd->add_option("--path-variant", g.path_variant, "greedy_edge | nn_chain | hilbert | exact")
      ->check(CLI::IsMember({"greedy_edge", "nn_chain", "hilbert", "exact"}))
      ->capture_default_str();
  cmd->add_option("--hilbert-bits", g.hilbert_bits, "Bits per dimension for the Hilbert path")
      ->check(CLI::Range(1, 31))
      ->capture_default_str();
  cmd->add_option("--backend", g.backend, "kNN backend: kd_tree | brute_force")
      ->check(CLI::IsMember({"kd_tree", "brute_force"}))
      ->capture_default_str();
}

void add_common_options(CLI::App* cmd) {
  cmd->add_option("--seed", seed_value, "Seed for every random stream")
      ->envname("GRAPHBAL_SEED")
      ->capture_default_str();
  cmd->add_option("--output,-o", output_path, "Output file (default: stdout)");
}

void emit(const std::string& text) {
  if (output_path.empty()) {
    std::cout << text;
  } else {
    gb::write_text_file(output_path, text);
  }
}

void echo_seed_source() {
  if (const char* env = std::getenv("GRAPHBAL_SEED"); env != nullptr) {
    std::cerr << "graphbal: GRAPHBAL_SEED=" << env << " is set; using seed " << seed_value << '\n';
  }
}

gb::LoadedDataset load(const InputOptions& in) {
  gb::CsvSchema schema;
  schema.group_column = in.group_column;
  schema.covariate_columns = in.covariates;
  schema.delimiter = in.delimiter;
  for (const auto& spec : in.jitter) {
    gb::JitterColumn col;
    const auto eq = spec.find('=');
    col.name = spec.substr(0, eq);
    if (eq != std::string::npos) {
      try {
        col.scale = std::stod(spec.substr(eq + 1));
      } catch (const std::exception&) {
        throw gb::InputError("bad jitter scale in '" + spec + "'");
      }
    }
    schema.jitter_columns.push_back(col);
  }
  return gb::read_csv_dataset(in.path, schema, seed_value);
}

gb::BalanceConfig balance_config(const GraphOptions& g) {
  gb::BalanceConfig config;
  config.k = g.k;
  config.metric = gb::metric_from_string(g.metric);
  config.path_variant = gb::path_method_from_string(g.path_variant);
  config.hilbert_bits = g.hilbert_bits;
  config.backend = g.backend == "brute_force" ? gb::KnnBackend::brute_force : gb::KnnBackend::kd_tree;
  config.seed = seed_value;
  return config;
}

// method[:form][:k=K][:path=P], e.g. "runs:extremum:path=hilbert".
gb::TestSpec parse_test_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.empty()) throw gb::InputError("empty test specification");
  gb::TestSpec spec;
  spec.method = gb::method_from_string(parts[0]);
  spec.form = gb::default_form(spec.method);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.rfind("k=", 0) == 0) {
      spec.k = std::stoi(p.substr(2));
    } else if (p.rfind("path=", 0) == 0) {
      spec.path = gb::path_method_from_string(p.substr(5));
    } else {
      spec.form = gb::form_request_from_string(p);
    }
  }
  return spec;
}

nlohmann::json matrix_json(const gb::SquareMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

nlohmann::json vector_json(const gb::Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

int run_test(const InputOptions& in, const GraphOptions& g, const std::string& form_name,
             int n_mc, long long perm_draws) {
  echo_seed_source();
  const gb::LoadedDataset loaded = load(in);
  const gb::Method method = gb::method_from_string(g.method);
  const gb::FormRequest form =
      form_name.empty() ? gb::default_form(method) : gb::form_request_from_string(form_name);
  gb::BalanceConfig config = balance_config(g);
  config.n_mc = n_mc;
  config.permutation_draws = perm_draws;
  gb::TestReport report = gb::balance_test(loaded.dataset, method, form, config);
  report.group_labels = loaded.group_labels;
  emit(gb::report_to_json(report));
  return 0;
}

int run_graph(const InputOptions& in, const GraphOptions& g) {
  echo_seed_source();
  const gb::LoadedDataset loaded = load(in);
  const gb::Matrix scaled =
      gb::apply_metric_scaling(loaded.dataset.data(), gb::metric_from_string(g.metric));
  const gb::DistanceMatrix d = gb::pairwise_distances(scaled);
  std::vector<gb::Edge> edges;
  if (g.method == "knn") {
    const int k = g.k.value_or(gb::default_k(loaded.dataset.size()));
    const auto backend =
        g.backend == "brute_force" ? gb::KnnBackend::brute_force : gb::KnnBackend::kd_tree;
    edges = gb::knn_edges(gb::knn_graph(scaled, k, backend), d);
  } else if (g.method == "crossmatch" || g.method == "nbm") {
    const gb::Matching m = gb::nbm_matching(d);
    if (m.dropped_unit) std::cerr << "graphbal: dropped unit " << *m.dropped_unit << '\n';
    edges = gb::matching_edges(m, d);
  } else {
    const gb::PathMethod variant = gb::path_method_from_string(g.path_variant);
    gb::Path path = variant == gb::PathMethod::hilbert ? gb::hilbert_path(scaled, g.hilbert_bits)
                    : variant == gb::PathMethod::exact ? gb::exact_path(d)
                                                       : gb::greedy_path(d, variant);
    edges = gb::path_edges(path, d);
  }
  emit(gb::edges_to_csv(edges));
  return 0;
}

int run_oracle(const InputOptions& in, const GraphOptions& g) {
  echo_seed_source();
  const gb::LoadedDataset loaded = load(in);
  const gb::Dataset& ds = loaded.dataset;
  const int groups = ds.num_groups();
  const gb::Matrix scaled = gb::apply_metric_scaling(ds.data(), gb::metric_from_string(g.metric));
  const gb::DistanceMatrix d = gb::pairwise_distances(scaled);
  const gb::Method method = gb::method_from_string(g.method);
  const gb::RandomStream rng(seed_value, 1);

  nlohmann::json out;
  out["method"] = g.method;
  out["n"] = ds.size();
  out["group_sizes"] = ds.group_sizes();
  out["group_labels"] = loaded.group_labels;
  out["metric"] = g.metric;
  out["seed"] = seed_value;

  std::optional<gb::KnnGraph> graph;
  std::optional<gb::Path> path;
  std::optional<gb::Matching> matching;
  gb::StatisticKind kind{};
  std::optional<gb::GraphRef> ref;
  if (method == gb::Method::knn) {
    const int k = g.k.value_or(gb::default_k(ds.size()));
    graph = gb::knn_graph(scaled, k);
    kind = gb::StatisticKind::knn_counts;
    ref = std::cref(*graph);
    out["k"] = k;
  } else if (method == gb::Method::crossmatch) {
    matching = gb::nbm_matching(d);
    if (matching->dropped_unit) {
      throw gb::InputError("oracle: crossmatch needs an even number of units");
    }
    kind = gb::StatisticKind::crossmatch_pairs;
    ref = std::cref(*matching);
  } else {
    const gb::PathMethod variant = gb::path_method_from_string(g.path_variant);
    path = variant == gb::PathMethod::hilbert ? gb::hilbert_path(scaled, g.hilbert_bits)
           : variant == gb::PathMethod::exact ? gb::exact_path(d)
                                              : gb::greedy_path(d, variant);
    kind = method == gb::Method::runs ? gb::StatisticKind::runs : gb::StatisticKind::ranks_kw;
    ref = std::cref(*path);
    out["path_method"] = g.path_variant;
  }

  const auto statistic = gb::make_label_statistic(kind, *ref, groups);
  const gb::PermutationNull null = gb::permutation_null(
      statistic, ds.group_sizes(), gb::NullMode::exhaustive, 0, rng, gb::Execution::parallel);
  const gb::Vector observed = statistic(ds.labels());
  out["statistic_kind"] = gb::to_string(kind);
  out["labelings"] = null.draws;
  out["observed"] = vector_json(observed);
  out["exact_mean"] = vector_json(null.empirical_mean);
  out["exact_covariance"] = matrix_json(null.empirical_cov);
  if (method == gb::Method::knn) {
    const gb::KnnMoments m =
        gb::knn_moments(ds.size(), ds.group_sizes(), graph->k(), gb::graph_functionals(*graph));
    out["analytic_mean"] = vector_json(m.expectation);
    out["analytic_covariance"] = matrix_json(m.covariance);
  } else if (method == gb::Method::runs) {
    const gb::MomentSet m = gb::run_moments(ds.size(), ds.group_sizes());
    out["analytic_mean"] = vector_json(m.mean);
    out["analytic_covariance"] = matrix_json(m.covariance);
  }
  if (method == gb::Method::ranks) {
    const double h = observed(0);
    out["exact_p_value"] =
        null.upper_tail([](std::span<const double> s) { return s[0]; }, h);
  }
  emit(out.dump(2) + "\n");
  return 0;
}

int run_simulate(const std::string& kind, const std::vector<double>& deltas,
                 const std::vector<int>& dims, int groups, const std::vector<int>& sizes,
                 int motivating_n, int replicates, const std::vector<std::string>& test_specs,
                 double alpha, int n_mc, long long perm_draws, const std::string& metric) {
  echo_seed_source();
  std::vector<gb::ScenarioConfig> grid;
  for (int d : dims) {
    for (double delta : deltas) {
      gb::ScenarioConfig cell;
      cell.kind = gb::scenario_kind_from_string(kind);
      cell.delta = delta;
      cell.d = d;
      cell.groups = sizes.empty() ? groups : static_cast<int>(sizes.size());
      cell.sizes = sizes;
      cell.motivating_n = motivating_n;
      grid.push_back(cell);
    }
  }
  std::vector<gb::TestSpec> tests;
  for (const auto& spec : test_specs) tests.push_back(parse_test_spec(spec));
  gb::PowerOptions options;
  options.alpha = alpha;
  options.n_mc = n_mc;
  options.permutation_draws = perm_draws;
  options.metric = gb::metric_from_string(metric);
  const gb::PowerTable table = gb::power_study(grid, tests, replicates, seed_value, options);
  for (const auto& row : table.rows) {
    if (row.failures > 0) {
      std::cerr << "graphbal: " << row.scenario << " " << row.method << ":" << row.form << " had "
                << row.failures << " failed replicate(s): " << row.error << '\n';
    }
  }
  emit(gb::power_table_to_csv(table));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based multisample balance tests"};
  app.require_subcommand(1);

  InputOptions test_in;
  GraphOptions test_graph;
  std::string form_name;
  int n_mc = 100000;
  long long perm_draws = 10000;
  auto* test_cmd = app.add_subcommand("test", "Run a balance test on a CSV dataset (JSON report)");
  add_input_options(test_cmd, test_in);
  add_graph_options(test_cmd, test_graph);
  add_common_options(test_cmd);
  test_cmd->add_option("--method", test_graph.method, "knn | crossmatch | runs | ranks")
      ->check(CLI::IsMember({"knn", "crossmatch", "runs", "ranks"}))
      ->capture_default_str();
  test_cmd->add_option("--form", form_name,
                       "wald | max | min | extremum (default: wald, extremum for runs)")
      ->check(CLI::IsMember({"wald", "max", "min", "extremum"}));
  test_cmd->add_option("--mc", n_mc, "Monte Carlo draws for extremum p-values")
      ->check(CLI::Range(1000, 100000000))
      ->capture_default_str();
  test_cmd->add_option("--perm-draws", perm_draws, "Permutation draws for crossmatch moments")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string kind = "null";
  std::vector<double> deltas{0.0};
  std::vector<int> dims{10};
  int groups = 3;
  std::vector<int> sizes;
  int motivating_n = 150;
  int replicates = 200;
  std::vector<std::string> test_specs{"knn", "crossmatch", "runs", "ranks"};
  double alpha = 0.05;
  std::string sim_metric = "euclidean";
  int sim_mc = 100000;
  long long sim_perm = 10000;
  auto* sim_cmd = app.add_subcommand("simulate", "Power study over Gaussian scenarios (CSV)");
  add_common_options(sim_cmd);
  sim_cmd->add_option("--kind", kind, "null | location | scale | correlation | motivating")
      ->check(CLI::IsMember({"null", "location", "scale", "correlation", "motivating"}))
      ->capture_default_str();
  sim_cmd->add_option("--delta", deltas, "Effect sizes (comma separated)")->delimiter(',');
  sim_cmd->add_option("--d", dims, "Dimensions (comma separated)")->delimiter(',');
  sim_cmd->add_option("--groups", groups, "Number of groups (sizes 50 g)")->capture_default_str();
  sim_cmd->add_option("--sizes", sizes, "Explicit group sizes (comma separated)")->delimiter(',');
  sim_cmd->add_option("--motivating-n", motivating_n, "N for the motivating scenario")
      ->capture_default_str();
  sim_cmd->add_option("--replicates", replicates, "Replicates per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--tests", test_specs, "method[:form][:k=K][:path=P] (comma separated)")
      ->delimiter(',');
  sim_cmd->add_option("--alpha", alpha, "Rejection level")->capture_default_str();
  sim_cmd->add_option("--metric", sim_metric, "euclidean | standardized_euclidean")
      ->check(CLI::IsMember({"euclidean", "standardized_euclidean"}))
      ->capture_default_str();
  sim_cmd->add_option("--mc", sim_mc, "Monte Carlo draws for extremum p-values")
      ->check(CLI::Range(1000, 100000000))
      ->capture_default_str();
  sim_cmd->add_option("--perm-draws", sim_perm, "Permutation draws for crossmatch moments")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  InputOptions graph_in;
  GraphOptions graph_opts;
  auto* graph_cmd = app.add_subcommand("graph", "Emit the constructed graph as an edge list CSV");
  add_input_options(graph_cmd, graph_in);
  add_graph_options(graph_cmd, graph_opts);
  add_common_options(graph_cmd);
  graph_cmd->add_option("--method", graph_opts.method, "knn | crossmatch | runs | ranks")
      ->check(CLI::IsMember({"knn", "crossmatch", "runs", "ranks"}))
      ->capture_default_str();

  InputOptions oracle_in;
  GraphOptions oracle_opts;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "Exact permutation moments by enumerating every labeling");
  add_input_options(oracle_cmd, oracle_in);
  add_graph_options(oracle_cmd, oracle_opts);
  add_common_options(oracle_cmd);
  oracle_cmd->add_option("--method", oracle_opts.method, "knn | crossmatch | runs | ranks")
      ->check(CLI::IsMember({"knn", "crossmatch", "runs", "ranks"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*test_cmd) return run_test(test_in, test_graph, form_name, n_mc, perm_draws);
    if (*sim_cmd) {
      return run_simulate(kind, deltas, dims, groups, sizes, motivating_n, replicates, test_specs,
                          alpha, sim_mc, sim_perm, sim_metric);
    }
    if (*graph_cmd) return run_graph(graph_in, graph_opts);
    if (*oracle_cmd) return run_oracle(oracle_in, oracle_opts);
  } catch (const gb::Error& e) {
    std::cerr << "graphbal: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "graphbal: internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
