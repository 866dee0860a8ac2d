#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphbal/core.hpp"
#include "graphbal/hypothesis.hpp"
#include "graphbal/nngraph.hpp"
#include "graphbal/paths.hpp"
#include "graphbal/sim.hpp"

namespace graphbal {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 style: quoted fields may contain the delimiter, doubled quotes
/// and line breaks. Accepts LF or CRLF records. Every row must have as many
/// fields as the header.
CsvTable parse_csv(const std::string& text, char delimiter = ',');

struct JitterColumn {
  std::string name;
  std::optional<double> scale;  // default 1e-6 times the column range
};

struct CsvSchema {
  std::string group_column = "group";
  std::vector<std::string> covariate_columns;  // empty: every other column
  std::vector<JitterColumn> jitter_columns;
  char delimiter = ',';
};

struct LoadedDataset {
  Dataset dataset;
  std::vector<std::string> group_labels;  // group g (1-based) was group_labels[g-1]
  std::vector<std::string> covariate_names;
};

/// Parses covariates and group labels. Labels are renumbered 1..G in order
/// of first appearance. Jitter adds uniform noise in (-scale/2, scale/2) from
/// the stream (seed, 4).
LoadedDataset parse_csv_dataset(const std::string& text, const CsvSchema& schema,
                                std::uint64_t seed);
LoadedDataset read_csv_dataset(const std::string& path, const CsvSchema& schema,
                               std::uint64_t seed);

/// Canonical JSON: sorted keys, two-space indent, shortest round-trip
/// numbers, trailing newline. Absent dof and mc_se are omitted; absent
/// graph_meta entries are null.
std::string report_to_json(const TestReport& report);
TestReport report_from_json(const std::string& text);

std::string power_table_to_csv(const PowerTable& table);

/// Writes a TestReport (json) or a PowerTable (csv) to `path`.
void write_report(const TestReport& report, const std::string& path);
void write_report(const PowerTable& table, const std::string& path);

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 0.0;
};

std::vector<Edge> knn_edges(const KnnGraph& graph, const DistanceMatrix& d);
std::vector<Edge> path_edges(const Path& path, const DistanceMatrix& d);
std::vector<Edge> matching_edges(const Matching& matching, const DistanceMatrix& d);

/// Header `src,dst,weight`, one edge per line.
std::string edges_to_csv(const std::vector<Edge>& edges);

/// Shortest decimal string that parses back to `value`.
std::string format_double(double value);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace graphbal
