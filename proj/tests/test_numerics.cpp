#include <gtest/gtest.h>

#include <cmath>

#include "graphbal/numerics.hpp"
#include "oracles.hpp"

using namespace graphbal;

TEST(Philox, KnownAnswerVectors) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(RandomStream::philox({0, 0, 0, 0}, {0, 0}),
            (A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(RandomStream::philox({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu}),
            (A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(RandomStream::philox({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u}),
            (A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, ReproducibleAndDistinctStreams) {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs_c |= x != c();
    differs_d |= x != d();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
  EXPECT_EQ(RandomStream(1, 2).derive(3)(), RandomStream(1, 2).derive(3)());
  EXPECT_NE(RandomStream(1, 2).derive(3)(), RandomStream(1, 2).derive(4)());
}

TEST(RandomStream, UniformAndBelowRanges) {
  RandomStream rng(9);
  double sum = 0.0;
  std::array<int, 7> counts{};
  for (int i = 0; i < 70000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ++counts[rng.below(7)];
  }
  EXPECT_NEAR(sum / 70000, 0.5, 4 * std::sqrt(1.0 / 12 / 70000));
  for (int c : counts) EXPECT_NEAR(c, 10000, 4 * std::sqrt(10000 * 6.0 / 7));
}

TEST(StdNormalCdf, ReferenceValues) {
  EXPECT_EQ(std_normal_cdf(0.0), 0.5);
  EXPECT_NEAR(std_normal_cdf(1.959963985), 0.975, 1e-9);
  for (double x : {0.3, 1.0, 2.5, 6.0, 9.0}) {
    EXPECT_NEAR(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, 1e-12);
  }
  // Simpson integral of the density from 0.
  const double oracle_val =
      0.5 + oracle::simpson([](double t) { return std::exp(-t * t / 2) / std::sqrt(2 * M_PI); },
                            0.0, 1.3, 2000);
  EXPECT_NEAR(std_normal_cdf(1.3), oracle_val, 1e-12);
}

TEST(ChiSquareSf, ClosedFormsAndIntegration) {
  EXPECT_EQ(chi_square_sf(0.0, 3), 1.0);
  for (double t : {0.5, 2.0, 7.0}) EXPECT_NEAR(chi_square_sf(t, 2), std::exp(-t / 2), 1e-14);
  EXPECT_NEAR(chi_square_sf(5.991464547, 2), 0.05, 1e-8);
  const double integral = oracle::upper_tail(
      [](double x) { return oracle::chi_square_density(x, 5); }, 11.0705, 400.0);
  EXPECT_NEAR(integral, 0.05, 1e-4);
  EXPECT_NEAR(chi_square_sf(11.0705, 5), integral, 1e-8);
  EXPECT_THROW(chi_square_sf(-1.0, 2), DomainError);
}

TEST(ChiSquareSf, MonotoneOnGrid) {
  for (int nu : {1, 2, 5, 20}) {
    double prev = 1.0;
    for (double t = 0.0; t < 60.0; t += 0.25) {
      const double p = chi_square_sf(t, nu);
      EXPECT_LE(p, prev);
      prev = p;
    }
  }
}

TEST(FSf, SpotValuesAndIdentities) {
  EXPECT_EQ(f_sf(0.0, 3, 7), 1.0);
  const double integral =
      oracle::upper_tail([](double x) { return oracle::f_density(x, 2, 10); }, 4.102821, 4e6);
  EXPECT_NEAR(integral, 0.05, 1e-4);
  EXPECT_NEAR(f_sf(4.102821, 2, 10), integral, 1e-4);
  // P(F(1, d2) >= t) = P(|t_d2| >= sqrt t): the t density integrated two-sided.
  for (int d2 : {3, 12}) {
    for (double t : {0.5, 2.0, 6.0}) {
      const double nu = d2;
      auto t_density = [nu](double x) {
        return std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) -
                        0.5 * std::log(nu * M_PI) - (nu + 1) / 2 * std::log1p(x * x / nu));
      };
      const double two_sided = 2.0 * oracle::upper_tail(t_density, std::sqrt(t), 1e6);
      EXPECT_NEAR(f_sf(t, 1, d2), two_sided, 1e-6);
    }
  }
  EXPECT_THROW(f_sf(-0.1, 2, 3), DomainError);
}

TEST(FSf, MonotoneOnGrid) {
  double prev = 1.0;
  for (double t = 0.0; t < 30.0; t += 0.1) {
    const double p = f_sf(t, 4, 25);
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(SolveSpdOrPinv, IdentityAndDiagonal) {
  const SquareMatrix id = SquareMatrix::Identity(3, 3);
  const Vector b = Vector::LinSpaced(3, 1.0, 3.0);
  const SolveResult r = solve_spd_or_pinv(id, b);
  EXPECT_EQ(r.rank, 3);
  EXPECT_TRUE(r.x.isApprox(b));
  SquareMatrix a = SquareMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  Vector b2(2);
  b2 << 2.0, 0.0;
  const SolveResult r2 = solve_spd_or_pinv(a, b2);
  EXPECT_EQ(r2.rank, 1);
  EXPECT_NEAR(r2.x(0), 2.0, 1e-15);
  EXPECT_NEAR(r2.x(1), 0.0, 1e-15);
}

TEST(SolveSpdOrPinv, RandomSpdResidual) {
  RandomStream rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    SquareMatrix m(6, 6);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) m(i, j) = rng.normal();
    }
    const SquareMatrix a = m * m.transpose() + 0.1 * SquareMatrix::Identity(6, 6);
    Vector b(6);
    for (int i = 0; i < 6; ++i) b(i) = rng.normal();
    const SolveResult r = solve_spd_or_pinv(a, b);
    EXPECT_EQ(r.rank, 6);
    EXPECT_LE((a * r.x - b).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SolveSpdOrPinv, RejectsAsymmetric) {
  SquareMatrix a(2, 2);
  a << 1, 0.5, 0.2, 1;
  EXPECT_THROW(solve_spd_or_pinv(a, Vector::Ones(2)), InputError);
}

TEST(GaussianVector, DegenerateFactorAndMean) {
  RandomStream rng(1);
  Vector mean(3);
  mean << 1, 2, 3;
  EXPECT_EQ(gaussian_vector(rng, mean, SquareMatrix::Zero(3, 3)), mean);
  EXPECT_THROW(gaussian_vector(rng, mean, SquareMatrix::Zero(2, 2)), InputError);

  RandomStream a(5, 1), b(5, 1);
  EXPECT_EQ(gaussian_vector(a, mean, SquareMatrix::Identity(3, 3)),
            gaussian_vector(b, mean, SquareMatrix::Identity(3, 3)));

  const int draws = 100000;
  Vector acc = Vector::Zero(3);
  for (int i = 0; i < draws; ++i) acc += gaussian_vector(rng, mean, SquareMatrix::Identity(3, 3));
  acc /= draws;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(acc(i), mean(i), 4.0 / std::sqrt(draws));
}

TEST(MvnExtremumSf, UnivariateIndependentAndReflection) {
  RandomStream rng(17);
  const SquareMatrix one = SquareMatrix::Identity(1, 1);
  const TailEstimate e1 = mvn_extremum_sf(1.2, one, Direction::max, 100000, rng);
  EXPECT_NEAR(e1.p, 1 - std_normal_cdf(1.2), 3 * e1.mc_se);

  const SquareMatrix id3 = SquareMatrix::Identity(3, 3);
  const TailEstimate e3 = mvn_extremum_sf(1.5, id3, Direction::max, 100000, rng);
  EXPECT_NEAR(e3.p, 1 - std::pow(std_normal_cdf(1.5), 3), 3 * e3.mc_se);

  SquareMatrix omega(3, 3);
  omega << 1, 0.4, -0.2, 0.4, 1, 0.3, -0.2, 0.3, 1;
  const TailEstimate hi = mvn_extremum_sf(0.8, omega, Direction::max, 100000, rng);
  const TailEstimate lo = mvn_extremum_sf(-0.8, omega, Direction::min, 100000, rng);
  EXPECT_NEAR(hi.p, lo.p, 3 * std::hypot(hi.mc_se, lo.mc_se));
}

TEST(MvnExtremumSf, ValidatesInput) {
  RandomStream rng(1);
  SquareMatrix bad = SquareMatrix::Identity(2, 2);
  bad(1, 1) = 1.1;
  EXPECT_THROW(mvn_extremum_sf(0.0, bad, Direction::max, 1000, rng), InputError);
  EXPECT_THROW(mvn_extremum_sf(0.0, SquareMatrix::Identity(2, 2), Direction::max, 999, rng),
               InputError);
}

TEST(MvnExtremumSf, DeterministicGivenStream) {
  SquareMatrix omega(2, 2);
  omega << 1, 0.5, 0.5, 1;
  RandomStream a(8, 2), b(8, 2);
  EXPECT_EQ(mvn_extremum_sf(1.0, omega, Direction::max, 5000, a).p,
            mvn_extremum_sf(1.0, omega, Direction::max, 5000, b).p);
}

TEST(PsdFactor, ClipsNearSingular) {
  SquareMatrix a(2, 2);
  a << 1, 1, 1, 1;
  const SquareMatrix f = psd_factor(a);
  EXPECT_TRUE((f * f.transpose()).isApprox(a, 1e-12));
}
