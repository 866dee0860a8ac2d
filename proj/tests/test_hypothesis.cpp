#include <gtest/gtest.h>

#include <numeric>

#include "graphbal/hypothesis.hpp"
#include "graphbal/sim.hpp"
#include "oracles.hpp"

using namespace graphbal;

namespace {

Dataset gaussian_groups(const std::vector<int>& sizes, int d, std::uint64_t seed) {
  ScenarioConfig c;
  c.kind = ScenarioKind::null;
  c.d = d;
  c.groups = static_cast<int>(sizes.size());
  c.sizes = sizes;
  c.seed = seed;
  return gen_gaussian_scenario(c, 0);
}

}  // namespace

TEST(WaldTest, IdentityCases) {
  const Vector mu = Vector::LinSpaced(3, 1, 3);
  const TestReport r0 = wald_test(mu, mu, SquareMatrix::Identity(3, 3), DofPolicy::full);
  EXPECT_EQ(r0.t, 0.0);
  EXPECT_EQ(r0.p_value, 1.0);
  EXPECT_EQ(r0.dof, 3);
  Vector s = mu;
  s(0) += 1.0;
  const TestReport r1 = wald_test(s, mu, SquareMatrix::Identity(3, 3), DofPolicy::minus_one);
  EXPECT_NEAR(r1.t, 1.0, 1e-15);
  EXPECT_EQ(r1.dof, 2);
}

TEST(WaldTest, RankReductionEqualsExplicitReduction) {
  // Sigma = B B^T with B of rank 2; reduce by projecting on B's column space.
  SquareMatrix b(3, 2);
  b << 1, 0, 1, 1, 0, 2;
  const SquareMatrix sigma = b * b.transpose();
  Vector mu = Vector::Zero(3);
  Vector coef(2);
  coef << 0.7, -1.3;
  const Vector s = b * coef;  // lies in the column space
  const TestReport r = wald_test(s, mu, sigma, DofPolicy::rank);
  EXPECT_EQ(r.dof, 2);
  // Reduced statistic: with s = B c, T = c^T (B^T B)(B^T B B^T B)^-1 (B^T B) c = c^T c.
  EXPECT_NEAR(r.t, coef.squaredNorm(), 1e-9);

  // Two run counts with a degenerate group: the covariance has rank 1 and
  // the Wald statistic reduces to the single informative coordinate.
  const std::vector<int> sizes{1, 5};
  const MomentSet m = run_moments(6, sizes);
  Vector runs(2);
  runs << 1.0, 1.0;
  const TestReport rr = wald_test(runs, m.mean, m.covariance, DofPolicy::rank);
  EXPECT_EQ(rr.dof, 1);
  const double z = runs(1) - m.mean(1);
  EXPECT_NEAR(rr.t, z * z / m.covariance(1, 1), 1e-12);
}

TEST(WaldTest, ZeroDofIsDegenerate) {
  EXPECT_THROW(wald_test(Vector::Zero(2), Vector::Zero(2), SquareMatrix::Zero(2, 2), DofPolicy::rank),
               DegenerateError);
}

TEST(ExtremumTest, ReferenceCases) {
  RandomStream rng(11);
  const SquareMatrix one = SquareMatrix::Identity(1, 1);
  Vector u(1);
  u << 1.1;
  const TestReport r1 = extremum_test(u, one, Direction::max, 100000, rng);
  EXPECT_NEAR(r1.p_value, 1 - std_normal_cdf(1.1), 3 * *r1.mc_se);
  EXPECT_FALSE(r1.dof);

  Vector u3(3);
  u3 << 0.2, 1.7, -0.4;
  const TestReport r3 = extremum_test(u3, SquareMatrix::Identity(3, 3), Direction::max, 100000, rng);
  EXPECT_EQ(r3.t, 1.7);
  EXPECT_NEAR(r3.p_value, 1 - std::pow(std_normal_cdf(1.7), 3), 3 * *r3.mc_se);

  SquareMatrix omega(3, 3);
  omega << 1, 0.3, 0.1, 0.3, 1, -0.2, 0.1, -0.2, 1;
  const TestReport lo = extremum_test(-u3, omega, Direction::min, 100000, rng);
  const TestReport hi = extremum_test(u3, omega, Direction::max, 100000, rng);
  EXPECT_EQ(lo.test_form, TestForm::min);
  EXPECT_NEAR(lo.p_value, hi.p_value, 3 * std::hypot(*lo.mc_se, *hi.mc_se));
}

TEST(BalanceTest, ConfigurationErrors) {
  const Dataset two = gaussian_groups({10, 10}, 2, 1);
  EXPECT_THROW(balance_test(two, Method::ranks, FormRequest::extremum), ConfigurationError);
  EXPECT_THROW(balance_test(two, Method::ranks, FormRequest::max), ConfigurationError);
  Matrix x = oracle::random_points(10, 2, 3);
  const Dataset single(x, std::vector<int>(10, 1));
  EXPECT_THROW(balance_test(single, Method::knn, FormRequest::wald), ConfigurationError);
}

TEST(BalanceTest, DeterministicReports) {
  const Dataset ds = gaussian_groups({20, 25, 30}, 3, 5);
  BalanceConfig cfg;
  cfg.seed = 77;
  cfg.n_mc = 5000;
  cfg.permutation_draws = 500;
  for (Method m : {Method::knn, Method::crossmatch, Method::runs, Method::ranks}) {
    for (FormRequest f : {FormRequest::wald, FormRequest::extremum}) {
      if (m == Method::ranks && f != FormRequest::wald) continue;
      const TestReport a = balance_test(ds, m, f, cfg);
      const TestReport b = balance_test(ds, m, f, cfg);
      EXPECT_EQ(a, b) << to_string(m) << " " << to_string(f);
      EXPECT_GE(a.p_value, 0.0);
      EXPECT_LE(a.p_value, 1.0);
      EXPECT_EQ(a.dof.has_value(), a.test_form == TestForm::wald);
      EXPECT_EQ(a.graph_meta.seed, 77u);
      EXPECT_EQ(a.graph_meta.n, 75);
    }
  }
}

TEST(BalanceTest, SerialAndParallelAgree) {
  const Dataset ds = gaussian_groups({30, 31}, 4, 2);
  BalanceConfig cfg;
  cfg.n_mc = 2000;
  cfg.permutation_draws = 300;
  for (Method m : {Method::knn, Method::crossmatch, Method::runs}) {
    cfg.exec = Execution::serial;
    const TestReport a = balance_test(ds, m, default_form(m), cfg);
    cfg.exec = Execution::parallel;
    const TestReport b = balance_test(ds, m, default_form(m), cfg);
    EXPECT_EQ(a, b);
  }
}

TEST(BalanceTest, DefaultsAndMetadata) {
  const Dataset ds = gaussian_groups({20, 21}, 2, 8);
  BalanceConfig cfg;
  cfg.n_mc = 2000;
  cfg.permutation_draws = 200;
  const TestReport knn = balance_test(ds, Method::knn, FormRequest::wald, cfg);
  EXPECT_EQ(knn.graph_meta.k, 4);
  EXPECT_EQ(knn.graph_meta.graph, "knn");
  EXPECT_EQ(knn.dof, 2);
  EXPECT_EQ(knn.moment_source, MomentSource::analytic);
  EXPECT_EQ(knn.continuity_correction, -0.5);

  const TestReport cm = balance_test(ds, Method::crossmatch, FormRequest::extremum, cfg);
  EXPECT_EQ(cm.test_form, TestForm::min);
  ASSERT_TRUE(cm.graph_meta.dropped_unit);  // N = 41
  EXPECT_EQ(cm.statistic.size(), 1u);

  const TestReport runs = balance_test(ds, Method::runs, default_form(Method::runs), cfg);
  EXPECT_EQ(runs.test_form, TestForm::min);
  EXPECT_EQ(runs.graph_meta.path_method, std::string("greedy_edge"));
  EXPECT_TRUE(runs.mc_se);
  EXPECT_EQ(default_k(9), 1);
  EXPECT_EQ(default_k(150), 15);
}

TEST(BalanceTest, CommonScalingLeavesStatisticsUnchanged) {
  const Dataset ds = gaussian_groups({15, 18, 20}, 3, 4);
  const Dataset scaled(ds.data() * 3.5, ds.labels());
  BalanceConfig cfg;
  cfg.n_mc = 2000;
  cfg.permutation_draws = 300;
  for (Method m : {Method::knn, Method::crossmatch, Method::runs, Method::ranks}) {
    const TestReport a = balance_test(ds, m, default_form(m), cfg);
    const TestReport b = balance_test(scaled, m, default_form(m), cfg);
    EXPECT_EQ(a.statistic, b.statistic) << to_string(m);
    EXPECT_NEAR(a.t, b.t, 1e-9);
  }
}

TEST(BalanceTest, KnnWaldInvariantToRelabeling) {
  const Dataset ds = gaussian_groups({15, 18, 20}, 3, 6);
  std::vector<int> relabeled;
  const std::vector<int> perm{0, 3, 1, 2};
  for (int z : ds.labels()) relabeled.push_back(perm[z]);
  const Dataset other(ds.data(), relabeled);
  const TestReport a = balance_test(ds, Method::knn, FormRequest::wald);
  const TestReport b = balance_test(other, Method::knn, FormRequest::wald);
  EXPECT_NEAR(a.t, b.t, 1e-9);
}

namespace {

// Share of labelings with p <= alpha, minus the boundary atom (the labelings
// whose p equals the largest attained p <= alpha). Exact discreteness can
// push the rejection share above alpha by that atom and no further.
double share_below_boundary_atom(const std::vector<double>& ps, double alpha) {
  double star = -1.0;
  for (double p : ps) {
    if (p <= alpha) star = std::max(star, p);
  }
  int below = 0, at = 0;
  for (double p : ps) {
    below += p <= alpha;
    at += star >= 0.0 && std::abs(p - star) <= 1e-9;
  }
  return static_cast<double>(below - at) / static_cast<double>(ps.size());
}

void expect_calibrated_over_all_labelings(Method method, const std::vector<int>& sizes) {
  int n = 0;
  for (int s : sizes) n += s;
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Matrix x = oracle::random_points(n, 2, 100 + seed);
    std::vector<double> ps;
    oracle::for_each_labeling(sizes, [&](const std::vector<int>& z) {
      ps.push_back(balance_test(Dataset(x, z), method, FormRequest::wald).p_value);
    });
    for (double alpha : {0.05, 0.10}) {
      EXPECT_LE(share_below_boundary_atom(ps, alpha), alpha)
          << to_string(method) << " N=" << n << " seed " << seed << " alpha " << alpha;
    }
  }
}

}  // namespace

TEST(TinyNullCalibration, RunsWald) {
  expect_calibrated_over_all_labelings(Method::runs, {5, 5});
  expect_calibrated_over_all_labelings(Method::runs, {7, 7});
  expect_calibrated_over_all_labelings(Method::runs, {4, 4, 4});
}

TEST(TinyNullCalibration, RanksWald) {
  expect_calibrated_over_all_labelings(Method::ranks, {5, 5});
  expect_calibrated_over_all_labelings(Method::ranks, {7, 7});
  expect_calibrated_over_all_labelings(Method::ranks, {4, 4, 4});
}

TEST(TinyNullCalibration, CrossmatchWald) {
  expect_calibrated_over_all_labelings(Method::crossmatch, {5, 5});
}

TEST(TinyNullCalibration, KnnWald) {
  expect_calibrated_over_all_labelings(Method::knn, {5, 5});
  expect_calibrated_over_all_labelings(Method::knn, {7, 7});
  expect_calibrated_over_all_labelings(Method::knn, {4, 4, 4});
}

TEST(Names, RoundTrip) {
  for (Method m : {Method::knn, Method::crossmatch, Method::runs, Method::ranks}) {
    EXPECT_EQ(method_from_string(to_string(m)), m);
  }
  for (FormRequest f : {FormRequest::wald, FormRequest::extremum, FormRequest::max, FormRequest::min}) {
    EXPECT_EQ(form_request_from_string(to_string(f)), f);
  }
  EXPECT_THROW(method_from_string("bogus"), InputError);
}
