#include <algorithm>
#include <cmath>
#include <string>

#include "graphbal/stats.hpp"

namespace graphbal {

LabelStatistic make_label_statistic(StatisticKind kind, GraphRef graph, int groups) {
  auto wrong = [&]() -> LabelStatistic {
    throw InputError("statistic " + to_string(kind) + " does not apply to this graph type");
  };
  switch (kind) {
    case StatisticKind::knn_counts: {
      const auto* g = std::get_if<std::reference_wrapper<const KnnGraph>>(&graph);
      if (!g) return wrong();
      const KnnGraph& ref = g->get();
      return [&ref, groups](std::span<const int> z) { return knn_counts(ref, z, groups).values; };
    }
    case StatisticKind::runs: {
      const auto* p = std::get_if<std::reference_wrapper<const Path>>(&graph);
      if (!p) return wrong();
      const Path& ref = p->get();
      return [&ref, groups](std::span<const int> z) { return run_counts(ref, z, groups).values; };
    }
    case StatisticKind::ranks_kw: {
      const auto* p = std::get_if<std::reference_wrapper<const Path>>(&graph);
      if (!p) return wrong();
      const Path& ref = p->get();
      return [&ref, groups](std::span<const int> z) {
        Vector v(1);
        v(0) = kw_rank_statistic(ref, z, groups).h;
        return v;
      };
    }
    case StatisticKind::crossmatch_pairs: {
      const auto* m = std::get_if<std::reference_wrapper<const Matching>>(&graph);
      if (!m) return wrong();
      const Matching& ref = m->get();
      return [&ref, groups](std::span<const int> z) {
        return crossmatch_counts(ref, z, groups).values;
      };
    }
  }
  return wrong();
}

double multinomial_count(std::span<const int> group_sizes) {
  // log-space to stay finite for large N; exact for the small sizes that matter.
  double log_count = 0.0;
  int n = 0;
  for (int size : group_sizes) {
    n += size;
    log_count -= std::lgamma(size + 1.0);
  }
  log_count += std::lgamma(n + 1.0);
  return std::round(std::exp(log_count));
}

double PermutationNull::upper_tail(const std::function<double(std::span<const double>)>& score,
                                   double observed) const {
  const double eps = 1e-10 * std::max(1.0, std::abs(observed));
  long long hits = 0;
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    const std::span<const double> row(samples.row(r).data(), static_cast<std::size_t>(samples.cols()));
    if (score(row) >= observed - eps) ++hits;
  }
  if (mode == NullMode::exhaustive) return static_cast<double>(hits) / static_cast<double>(draws);
  return (1.0 + static_cast<double>(hits)) / (1.0 + static_cast<double>(draws));
}

namespace {

std::vector<int> canonical_labels(std::span<const int> group_sizes) {
  std::vector<int> labels;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] < 1) throw InputError("permutation_null: group sizes must be positive");
    labels.insert(labels.end(), static_cast<std::size_t>(group_sizes[g]), static_cast<int>(g) + 1);
  }
  return labels;
}

void summarize(PermutationNull& out) {
  const Eigen::Index rows = out.samples.rows();
  out.empirical_mean = out.samples.colwise().mean().transpose();
  const Matrix centered = out.samples.rowwise() - out.empirical_mean.transpose();
  out.empirical_cov = (centered.transpose() * centered) / static_cast<double>(rows);
}

}  // namespace

PermutationNull permutation_null(const LabelStatistic& statistic, std::span<const int> group_sizes,
                                 NullMode mode, long long draws, const RandomStream& rng,
                                 Execution exec) {
  const std::vector<int> base = canonical_labels(group_sizes);
  const Vector first = statistic(base);
  const Eigen::Index m = first.size();
  PermutationNull out;
  out.mode = mode;

  if (mode == NullMode::exhaustive) {
    const double count = multinomial_count(group_sizes);
    if (count > kExhaustiveCap) {
      throw CapacityError("exhaustive permutation null would enumerate " +
                          std::to_string(static_cast<long long>(count)) +
                          " labelings (cap 1e6); use monte_carlo");
    }
    out.draws = static_cast<long long>(count);
    out.samples.resize(out.draws, m);
    std::vector<int> labels = base;
    long long r = 0;
    do {
      out.samples.row(r++) = statistic(labels).transpose();
    } while (std::next_permutation(labels.begin(), labels.end()));
    if (r != out.draws) throw std::logic_error("permutation_null: enumeration count mismatch");
    summarize(out);
    return out;
  }

  if (draws < 1) throw InputError("permutation_null needs at least one draw");
  out.draws = draws;
  out.samples.resize(draws, m);
  const int n = static_cast<int>(base.size());
  const bool parallel = exec == Execution::parallel;
#pragma omp parallel if (parallel)
  {
    std::vector<int> labels(base.size());
#pragma omp for schedule(static)
    for (long long r = 0; r < draws; ++r) {
      RandomStream stream = rng.derive(static_cast<std::uint64_t>(r));
      std::copy(base.begin(), base.end(), labels.begin());
      for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(stream.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(labels[i], labels[j]);
      }
      out.samples.row(r) = statistic(labels).transpose();
    }
  }
  summarize(out);
  return out;
}

PermutationNull permutation_null(StatisticKind kind, GraphRef graph,
                                 std::span<const int> group_sizes, NullMode mode, long long draws,
                                 const RandomStream& rng, Execution exec) {
  const auto statistic =
      make_label_statistic(kind, graph, static_cast<int>(group_sizes.size()));
  return permutation_null(statistic, group_sizes, mode, draws, rng, exec);
}

}  // namespace graphbal
