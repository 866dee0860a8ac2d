#include <gtest/gtest.h>

#include <cmath>

#include "graphbal/io.hpp"
#include "graphbal/sim.hpp"

using namespace graphbal;

namespace {

ScenarioConfig scenario(ScenarioKind kind, double delta, int d, int groups) {
  ScenarioConfig c;
  c.kind = kind;
  c.delta = delta;
  c.d = d;
  c.groups = groups;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(GaussianScenario, ZeroDeltaGivesIdenticalDataForEveryKind) {
  const Dataset base = gen_gaussian_scenario(scenario(ScenarioKind::null, 0.0, 4, 3), 5);
  EXPECT_EQ(base.group_sizes(), (std::vector<int>{50, 100, 150}));
  for (auto kind : {ScenarioKind::location, ScenarioKind::scale, ScenarioKind::correlation}) {
    const Dataset other = gen_gaussian_scenario(scenario(kind, 0.0, 4, 3), 5);
    EXPECT_EQ(other.data(), base.data()) << to_string(kind);
    EXPECT_EQ(other.labels(), base.labels());
  }
  const Dataset next = gen_gaussian_scenario(scenario(ScenarioKind::null, 0.0, 4, 3), 6);
  EXPECT_NE(next.data(), base.data());
}

TEST(GaussianScenario, LocationShiftOfLastGroup) {
  const Dataset ds = gen_gaussian_scenario(scenario(ScenarioKind::location, 0.1, 10, 3), 0);
  const int n3 = 150;
  const auto block = ds.data().bottomRows(n3);
  for (int c = 0; c < 10; ++c) {
    EXPECT_NEAR(block.col(c).mean(), 0.2, 4.0 / std::sqrt(n3));
  }
  EXPECT_EQ(ds.labels().back(), 3);
}

TEST(GaussianScenario, ScaleVarianceGrowsWithGroup) {
  ScenarioConfig c = scenario(ScenarioKind::scale, 0.5, 3, 2);
  c.sizes = {10000, 10000};
  const Dataset ds = gen_gaussian_scenario(c, 0);
  const Matrix g2 = ds.data().bottomRows(10000);
  for (int col = 0; col < 3; ++col) {
    const double mean = g2.col(col).mean();
    const double var = (g2.col(col).array() - mean).square().sum() / 9999;
    EXPECT_NEAR(var, 1.5, 4 * 1.5 * std::sqrt(2.0 / 9999));
  }
}

TEST(GaussianScenario, CorrelationApproachesTarget) {
  ScenarioConfig c = scenario(ScenarioKind::correlation, 0.6, 3, 3);
  c.sizes = {10000, 10000, 10000};
  const Dataset ds = gen_gaussian_scenario(c, 0);
  for (int g = 0; g < 3; ++g) {
    const Matrix x = ds.data().middleRows(10000 * g, 10000);
    const Matrix centered = x.rowwise() - x.colwise().mean();
    const Matrix cov = centered.transpose() * centered / 9999.0;
    const double rho = g * 0.6 / 2.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const double r = cov(a, b) / std::sqrt(cov(a, a) * cov(b, b));
        EXPECT_NEAR(r, rho, 0.04) << "group " << g + 1;
      }
    }
  }
}

TEST(GaussianScenario, Validation) {
  EXPECT_THROW(gen_gaussian_scenario(scenario(ScenarioKind::correlation, 1.0, 3, 3), 0),
               ConfigurationError);
  ScenarioConfig tiny = scenario(ScenarioKind::null, 0.0, 3, 2);
  tiny.sizes = {1, 5};
  EXPECT_THROW(validate_scenario(tiny), ConfigurationError);
  ScenarioConfig neg = scenario(ScenarioKind::scale, -0.6, 3, 3);
  EXPECT_THROW(validate_scenario(neg), ConfigurationError);
}

TEST(Motivating, Probabilities) {
  for (double p : motivating_probabilities(0.0, 0.0)) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  const double e1 = std::exp(-1.0), e2 = std::exp(0.5), e3 = std::exp(-1.9);
  const auto p = motivating_probabilities(1.0, 1.0);
  EXPECT_NEAR(p[0], e1 / (e1 + e2 + e3), 1e-15);
  EXPECT_NEAR(p[1], e2 / (e1 + e2 + e3), 1e-15);
  EXPECT_NEAR(p[2], e3 / (e1 + e2 + e3), 1e-15);
}

TEST(Motivating, DeterministicAndNonEmpty) {
  const MotivatingDraw a = gen_motivating(150, 4, 9);
  const MotivatingDraw b = gen_motivating(150, 4, 9);
  EXPECT_EQ(a.dataset.data(), b.dataset.data());
  EXPECT_EQ(a.dataset.labels(), b.dataset.labels());
  EXPECT_EQ(a.dataset.num_groups(), 3);
  EXPECT_EQ(a.dataset.dims(), 2);
  EXPECT_THROW(gen_motivating(2, 0, 1), InputError);
}

TEST(Motivating, BinnedFrequenciesNearOrigin) {
  std::array<int, 3> counts{};
  int in_bin = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const Dataset ds = gen_motivating(1000, rep, 21).dataset;
    for (int i = 0; i < ds.size(); ++i) {
      if (std::abs(ds.data()(i, 0)) < 0.1 && std::abs(ds.data()(i, 1)) < 0.1) {
        ++in_bin;
        ++counts[ds.labels()[i] - 1];
      }
    }
  }
  ASSERT_GT(in_bin, 500);
  for (int c : counts) {
    // Inside the bin every arm has probability within 0.02 of 1/3.
    EXPECT_NEAR(static_cast<double>(c) / in_bin, 1.0 / 3, 0.02 + 4 * std::sqrt(2.0 / 9 / in_bin));
  }
}

TEST(Diagnostics, IdenticalGroupsHaveZeroDifference) {
  Matrix x(6, 2);
  x << 0.5, 1, -1, 2, 3, 0.25, 0.5, 1, -1, 2, 3, 0.25;
  const Dataset ds(x, {1, 1, 1, 2, 2, 2});
  for (const auto& row : univariate_diagnostics(ds, default_covariate_functions())) {
    EXPECT_NEAR(row.std_diff, 0.0, 1e-15) << row.name;
    EXPECT_NEAR(row.f_statistic, 0.0, 1e-15);
    EXPECT_EQ(row.f_p_value, 1.0);
  }
}

TEST(Diagnostics, HandAnova) {
  Matrix x(4, 1);
  x << 0, 0, 1, 1;
  const Dataset ds(x, {1, 1, 2, 2});
  const std::vector<CovariateFunction> f{
      {"x", [](const Eigen::Ref<const Eigen::RowVectorXd>& r) { return r(0); }}};
  const auto rows = univariate_diagnostics(ds, f);
  ASSERT_EQ(rows.size(), 1u);
  // sd of {0,0,1,1} = sqrt(1/3); |0 - 0.5| = |1 - 0.5| = 0.5.
  EXPECT_NEAR(rows[0].std_diff, 0.5 / std::sqrt(1.0 / 3), 1e-14);
  // Zero within-group spread: between mean square 1, within 0.
  EXPECT_TRUE(std::isinf(rows[0].f_statistic));
  EXPECT_EQ(rows[0].f_p_value, 0.0);

  Matrix y(6, 1);
  y << 0, 1, 2, 2, 3, 7;
  const Dataset ds2(y, {1, 1, 1, 2, 2, 2});
  const auto r2 = univariate_diagnostics(ds2, f);
  // Means 1 and 4, grand 2.5: SSB = 3*2.25*2 = 13.5; SSW = 2 + 14 = 16.
  EXPECT_NEAR(r2[0].f_statistic, 13.5 / (16.0 / 4), 1e-12);
  EXPECT_NEAR(r2[0].f_p_value, f_sf(3.375, 1, 4), 1e-15);

  Matrix z = Matrix::Ones(4, 1);
  EXPECT_THROW(univariate_diagnostics(Dataset(z, {1, 1, 2, 2}), f), DegenerateError);
}

TEST(PowerStudy, DeterministicWithIntegerRates) {
  std::vector<ScenarioConfig> grid;
  for (double delta : {0.0, 0.3}) {
    ScenarioConfig c = scenario(ScenarioKind::location, delta, 2, 2);
    c.sizes = {15, 20};
    grid.push_back(c);
  }
  const std::vector<TestSpec> tests{{Method::knn, FormRequest::wald, {}, {}},
                                    {Method::runs, FormRequest::extremum, {}, {}},
                                    {Method::crossmatch, FormRequest::wald, {}, {}}};
  PowerOptions opt;
  opt.n_mc = 2000;
  opt.permutation_draws = 200;
  const int reps = 12;
  const PowerTable a = power_study(grid, tests, reps, 5, opt);
  opt.exec = Execution::serial;
  const PowerTable b = power_study(grid, tests, reps, 5, opt);
  EXPECT_EQ(power_table_to_csv(a), power_table_to_csv(b));
  ASSERT_EQ(a.rows.size(), 6u);
  for (const auto& row : a.rows) {
    EXPECT_EQ(row.replicates, reps);
    EXPECT_EQ(row.failures, 0) << row.error;
    EXPECT_EQ(row.rejection_rate, static_cast<double>(row.rejections) / reps);
    EXPECT_NEAR(row.mc_se,
                std::sqrt(row.rejection_rate * (1 - row.rejection_rate) / reps), 1e-15);
  }
  EXPECT_EQ(a.rows[1].form, "min");
  EXPECT_EQ(a.rows[0].method, "knn");
}

TEST(PowerStudy, FailuresAreRecorded) {
  ScenarioConfig c = scenario(ScenarioKind::null, 0.0, 2, 2);
  c.sizes = {3, 3};
  // k = 9 exceeds N - 1.
  const std::vector<TestSpec> tests{{Method::knn, FormRequest::wald, 9, {}}};
  const PowerTable t = power_study({c}, tests, 4, 1);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].failures, 4);
  EXPECT_EQ(t.rows[0].rejections, 0);
  EXPECT_FALSE(t.rows[0].error.empty());
}
