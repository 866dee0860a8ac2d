#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "graphbal/core.hpp"

namespace graphbal {

/// Counter-based random stream (Philox4x32-10).
///
/// The 128-bit counter block is (draw counter, stream_id) and the key is the
/// seed, so two streams with the same seed and different ids never share a
/// block. Output depends only on (seed, stream_id, position), which makes
/// replicate-keyed sub-streams reproducible regardless of thread scheduling.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent stream with the same seed and an id mixed from this
  /// stream's id and `tag`.
  RandomStream derive(std::uint64_t tag) const;

  /// Raw Philox4x32-10 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// SplitMix64 finalizer; used to combine seeds and tags into stream ids.
std::uint64_t mix64(std::uint64_t x);

double std_normal_cdf(double x);

/// Upper tail P(chi2_nu >= t). Throws DomainError for t < 0.
double chi_square_sf(double t, int nu);

/// Upper tail of the F(d1, d2) distribution. Throws DomainError for t < 0.
double f_sf(double t, int d1, int d2);

struct SolveResult {
  Vector x;
  int rank = 0;
};

/// Solves A x = b for symmetric A. Positive definite A uses a Cholesky solve;
/// otherwise the minimum-norm least-squares solution from an
/// eigendecomposition, dropping eigenvalues below tol * max eigenvalue.
SolveResult solve_spd_or_pinv(const SquareMatrix& a, const Vector& b, double tol = 1e-10);

/// Square-root factor F with F F^T = A after clipping negative eigenvalues to
/// zero. Equals the Cholesky factor when A is positive definite.
SquareMatrix psd_factor(const SquareMatrix& a);

/// mean + factor * z with z standard normal drawn from `rng`.
Vector gaussian_vector(RandomStream& rng, const Vector& mean, const SquareMatrix& factor);

enum class Direction { max, min };

struct TailEstimate {
  double p = 0.0;
  double mc_se = 0.0;
};

/// Monte Carlo estimate of P(max_g V_g >= t) or P(min_g V_g <= t) for
/// V ~ N(0, omega).
TailEstimate mvn_extremum_sf(double t, const SquareMatrix& omega, Direction direction, int n_mc,
                             RandomStream& rng);

}  // namespace graphbal
