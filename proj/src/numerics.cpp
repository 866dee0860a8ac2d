#include "graphbal/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace graphbal {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

std::array<std::uint32_t, 4> RandomStream::philox(std::array<std::uint32_t, 4> c,
                                                   std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

RandomStream::result_type RandomStream::operator()() {
  if (buffered_ == 0) {
    const auto block = philox(
        {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
         static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++counter_;
    buffer_[0] = (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    buffer_[1] = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
    buffered_ = 2;
  }
  return buffer_[static_cast<std::size_t>(2 - buffered_--)];
}

double RandomStream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RandomStream::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw InputError("RandomStream::below needs n >= 1");
  boost::random::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(*this);
}

RandomStream RandomStream::derive(std::uint64_t tag) const {
  return RandomStream(seed_, mix64(stream_id_ ^ mix64(tag + 0x632BE59BD9B4E019ull)));
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi_square_sf(double t, int nu) {
  if (nu < 1) throw DomainError("chi_square_sf needs nu >= 1");
  if (!(t >= 0.0)) throw DomainError("chi_square_sf needs t >= 0");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return boost::math::gamma_q(0.5 * nu, 0.5 * t);
}

double f_sf(double t, int d1, int d2) {
  if (d1 < 1 || d2 < 1) throw DomainError("f_sf needs positive degrees of freedom");
  if (!(t >= 0.0)) throw DomainError("f_sf needs t >= 0");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  // P(F >= t) = I_{d2 / (d2 + d1 t)}(d2 / 2, d1 / 2)
  const double x = d2 / (d2 + d1 * t);
  return boost::math::ibeta(0.5 * d2, 0.5 * d1, x);
}

SolveResult solve_spd_or_pinv(const SquareMatrix& a, const Vector& b, double tol) {
  const Eigen::Index g = a.rows();
  if (a.cols() != g || b.size() != g) throw InputError("solve_spd_or_pinv: dimension mismatch");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (((a - a.transpose()).cwiseAbs().array() > tol * scale).any()) {
    throw InputError("solve_spd_or_pinv: matrix is not symmetric");
  }
  const SquareMatrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<SquareMatrix> eig(sym);
  const Vector& lambda = eig.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  SolveResult out;
  if (lambda_max > 0.0 && lambda.minCoeff() > tol * lambda_max) {
    Eigen::LLT<SquareMatrix> llt(sym);
    if (llt.info() == Eigen::Success) {
      out.x = llt.solve(b);
      out.rank = static_cast<int>(g);
      return out;
    }
  }
  const SquareMatrix& q = eig.eigenvectors();
  Vector coeffs = q.transpose() * b;
  int rank = 0;
  for (Eigen::Index i = 0; i < g; ++i) {
    if (lambda_max > 0.0 && lambda(i) > tol * lambda_max) {
      coeffs(i) /= lambda(i);
      ++rank;
    } else {
      coeffs(i) = 0.0;
    }
  }
  out.x = q * coeffs;
  out.rank = rank;
  return out;
}

SquareMatrix psd_factor(const SquareMatrix& a) {
  const SquareMatrix sym = 0.5 * (a + a.transpose());
  Eigen::LLT<SquareMatrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<SquareMatrix> check(sym, Eigen::EigenvaluesOnly);
    if (check.eigenvalues().minCoeff() > 1e-12 * check.eigenvalues().maxCoeff()) {
      return llt.matrixL();
    }
  }
  Eigen::SelfAdjointEigenSolver<SquareMatrix> eig(sym);
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

Vector gaussian_vector(RandomStream& rng, const Vector& mean, const SquareMatrix& factor) {
  if (factor.rows() != mean.size() || factor.cols() != mean.size()) {
    throw InputError("gaussian_vector: factor is " + std::to_string(factor.rows()) + "x" +
                     std::to_string(factor.cols()) + " but mean has length " +
                     std::to_string(mean.size()));
  }
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + factor * z;
}

TailEstimate mvn_extremum_sf(double t, const SquareMatrix& omega, Direction direction, int n_mc,
                             RandomStream& rng) {
  const Eigen::Index g = omega.rows();
  if (g < 1 || omega.cols() != g) throw InputError("mvn_extremum_sf: omega must be square");
  if (n_mc < 1000) throw InputError("mvn_extremum_sf needs n_mc >= 1000");
  for (Eigen::Index i = 0; i < g; ++i) {
    if (std::abs(omega(i, i) - 1.0) > 1e-8) {
      throw InputError("mvn_extremum_sf: omega diagonal entry " + std::to_string(i) +
                       " is not 1");
    }
  }
  if (((omega - omega.transpose()).cwiseAbs().array() > 1e-8).any()) {
    throw InputError("mvn_extremum_sf: omega is not symmetric");
  }
  const SquareMatrix factor = psd_factor(omega);
  Vector z(g);
  Vector v(g);
  long long hits = 0;
  for (int draw = 0; draw < n_mc; ++draw) {
    for (Eigen::Index i = 0; i < g; ++i) z(i) = rng.normal();
    v.noalias() = factor * z;
    if (direction == Direction::max) {
      if (v.maxCoeff() >= t) ++hits;
    } else {
      if (v.minCoeff() <= t) ++hits;
    }
  }
  TailEstimate out;
  out.p = static_cast<double>(hits) / n_mc;
  out.mc_se = std::sqrt(out.p * (1.0 - out.p) / n_mc);
  return out;
}

}  // namespace graphbal
