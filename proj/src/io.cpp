#include "graphbal/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace graphbal {

using nlohmann::json;

CsvTable parse_csv(const std::string& text, char delimiter) {
  if (delimiter == '"' || delimiter == '\n' || delimiter == '\r') {
    throw InputError("invalid CSV delimiter");
  }
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A lone empty field is a blank line.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (field_started && !field.empty()) {
        throw InputError("CSV line " + std::to_string(line) + ": quote inside unquoted field");
      }
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw InputError("CSV ends inside a quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw InputError("CSV has no header");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw InputError("CSV record " + std::to_string(r + 1) + " has " +
                       std::to_string(records[r].size()) + " fields, header has " +
                       std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

namespace {

constexpr std::uint64_t kJitterStream = 4;

std::size_t column_index(const CsvTable& table, const std::string& name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) throw ValidationError("CSV has no column named '" + name + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  std::size_t start = cell.find_first_not_of(" \t");
  std::size_t stop = cell.find_last_not_of(" \t");
  double value = 0.0;
  if (start != std::string::npos) {
    const char* first = cell.data() + start;
    const char* last = cell.data() + stop + 1;
    if (*first == '+') ++first;
    const auto result = std::from_chars(first, last, value);
    if (result.ec == std::errc() && result.ptr == last && std::isfinite(value)) return value;
  }
  throw InputError("CSV row " + std::to_string(row + 2) + ", column '" + column +
                   "': cannot parse '" + cell + "' as a finite number");
}

}  // namespace

LoadedDataset parse_csv_dataset(const std::string& text, const CsvSchema& schema,
                                std::uint64_t seed) {
  const CsvTable table = parse_csv(text, schema.delimiter);
  const std::size_t group_idx = column_index(table, schema.group_column);

  std::vector<std::string> covariates = schema.covariate_columns;
  if (covariates.empty()) {
    for (const auto& name : table.header) {
      if (name != schema.group_column) covariates.push_back(name);
    }
  }
  if (covariates.empty()) throw ValidationError("CSV has no covariate columns");
  std::vector<std::size_t> cov_idx;
  for (const auto& name : covariates) {
    if (name == schema.group_column) {
      throw ValidationError("group column '" + name + "' cannot also be a covariate");
    }
    cov_idx.push_back(column_index(table, name));
  }

  const std::size_t n = table.rows.size();
  Matrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(covariates.size()));
  std::vector<int> labels(n);
  std::map<std::string, int> mapping;
  std::vector<std::string> group_labels;
  for (std::size_t r = 0; r < n; ++r) {
    const std::string& key = table.rows[r][group_idx];
    auto [it, inserted] = mapping.emplace(key, static_cast<int>(group_labels.size()) + 1);
    if (inserted) group_labels.push_back(key);
    labels[r] = it->second;
    for (std::size_t c = 0; c < cov_idx.size(); ++c) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_cell(table.rows[r][cov_idx[c]], r, covariates[c]);
    }
  }
  if (group_labels.size() < 2) {
    throw ValidationError("CSV has " + std::to_string(group_labels.size()) +
                          " group(s); at least two are required");
  }

  RandomStream rng(seed, kJitterStream);
  for (const auto& jitter : schema.jitter_columns) {
    const auto pos = std::find(covariates.begin(), covariates.end(), jitter.name);
    if (pos == covariates.end()) {
      throw ValidationError("jitter column '" + jitter.name + "' is not a covariate");
    }
    const auto c = static_cast<Eigen::Index>(pos - covariates.begin());
    double scale = 0.0;
    if (jitter.scale) {
      if (!(*jitter.scale >= 0.0)) {
        throw ValidationError("jitter scale for '" + jitter.name + "' must be nonnegative");
      }
      scale = *jitter.scale;
    } else {
      scale = 1e-6 * (data.col(c).maxCoeff() - data.col(c).minCoeff());
    }
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
      data(r, c) += scale * (rng.uniform() - 0.5);
    }
  }

  return {Dataset(std::move(data), std::move(labels)), std::move(group_labels),
          std::move(covariates)};
}

LoadedDataset read_csv_dataset(const std::string& path, const CsvSchema& schema,
                               std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_dataset(buffer.str(), schema, seed);
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string report_to_json(const TestReport& report) {
  json meta = {
      {"graph", report.graph_meta.graph},
      {"path_method", optional_json(report.graph_meta.path_method)},
      {"k", optional_json(report.graph_meta.k)},
      {"n", report.graph_meta.n},
      {"group_sizes", report.graph_meta.group_sizes},
      {"seed", report.graph_meta.seed},
      {"dropped_unit", optional_json(report.graph_meta.dropped_unit)},
      {"metric", report.graph_meta.metric},
  };
  json stat = json::array();
  for (double v : report.statistic) stat.push_back(number(v));
  json out = {
      {"statistic_kind", to_string(report.statistic_kind)},
      {"test_form", to_string(report.test_form)},
      {"T", number(report.t)},
      {"p_value", number(report.p_value)},
      {"graph_meta", std::move(meta)},
      {"moment_source", to_string(report.moment_source)},
      {"statistic", std::move(stat)},
      {"standardized", report.standardized},
      {"continuity_correction", report.continuity_correction},
      {"group_labels", report.group_labels},
  };
  if (report.dof) out["dof"] = *report.dof;
  if (report.mc_se) out["mc_se"] = number(*report.mc_se);
  return out.dump(2) + "\n";
}

TestReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    TestReport r;
    r.statistic_kind = statistic_kind_from_string(j.at("statistic_kind").get<std::string>());
    r.test_form = test_form_from_string(j.at("test_form").get<std::string>());
    r.t = read_number(j.at("T"));
    r.p_value = read_number(j.at("p_value"));
    if (j.contains("dof")) r.dof = j.at("dof").get<int>();
    if (j.contains("mc_se")) r.mc_se = read_number(j.at("mc_se"));
    r.moment_source = moment_source_from_string(j.at("moment_source").get<std::string>());
    for (const auto& v : j.at("statistic")) r.statistic.push_back(read_number(v));
    r.standardized = j.at("standardized").get<bool>();
    r.continuity_correction = j.at("continuity_correction").get<double>();
    r.group_labels = j.at("group_labels").get<std::vector<std::string>>();
    const json& m = j.at("graph_meta");
    r.graph_meta.graph = m.at("graph").get<std::string>();
    if (!m.at("path_method").is_null()) r.graph_meta.path_method = m.at("path_method").get<std::string>();
    if (!m.at("k").is_null()) r.graph_meta.k = m.at("k").get<int>();
    r.graph_meta.n = m.at("n").get<int>();
    r.graph_meta.group_sizes = m.at("group_sizes").get<std::vector<int>>();
    r.graph_meta.seed = m.at("seed").get<std::uint64_t>();
    if (!m.at("dropped_unit").is_null()) r.graph_meta.dropped_unit = m.at("dropped_unit").get<int>();
    r.graph_meta.metric = m.at("metric").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string power_table_to_csv(const PowerTable& table) {
  std::ostringstream os;
  os << "scenario,kind,delta,d,G,method,form,replicates,rejection_rate,mc_se,seed\n";
  for (const auto& row : table.rows) {
    os << row.scenario << ',' << to_string(row.kind) << ',' << format_double(row.delta) << ','
       << row.d << ',' << row.groups << ',' << row.method << ',' << row.form << ','
       << row.replicates << ',';
    if (row.failures > 0) {
      os << "NA,NA";
    } else {
      os << format_double(row.rejection_rate) << ',' << format_double(row.mc_se);
    }
    os << ',' << row.seed << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_report(const TestReport& report, const std::string& path) {
  write_text_file(path, report_to_json(report));
}

void write_report(const PowerTable& table, const std::string& path) {
  write_text_file(path, power_table_to_csv(table));
}

std::vector<Edge> knn_edges(const KnnGraph& graph, const DistanceMatrix& d) {
  std::vector<Edge> out;
  for (int i = 0; i < graph.size(); ++i) {
    for (int j : graph.neighbors(i)) out.push_back({i, j, d(i, j)});
  }
  return out;
}

std::vector<Edge> path_edges(const Path& path, const DistanceMatrix& d) {
  std::vector<Edge> out;
  for (std::size_t t = 1; t < path.order.size(); ++t) {
    out.push_back({path.order[t - 1], path.order[t], d(path.order[t - 1], path.order[t])});
  }
  return out;
}

std::vector<Edge> matching_edges(const Matching& matching, const DistanceMatrix& d) {
  std::vector<Edge> out;
  for (const auto& [a, b] : matching.pairs) out.push_back({a, b, d(a, b)});
  return out;
}

std::string edges_to_csv(const std::vector<Edge>& edges) {
  std::ostringstream os;
  os << "src,dst,weight\n";
  for (const auto& e : edges) os << e.src << ',' << e.dst << ',' << format_double(e.weight) << '\n';
  return os.str();
}

}  // namespace graphbal
