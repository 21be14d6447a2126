#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "fbm/measures.hpp"
#include "fbm/rng.hpp"
#include "fbm/walks.hpp"

namespace fbm {

/// ½(s^2H + t^2H - |s-t|^2H)
double fbm_covariance(double s, double t, double H);

/// Unit-step increment autocovariance of fBm: 1 at n = 0, else
/// ((n+1)^2H - 2n^2H + (n-1)^2H) / 2.
double fgn_autocovariance(std::uint64_t n, double H);

/// Dense symmetric matrix of fBm covariances on t_i = i/n, i = 1..n.
struct CovarianceMatrix {
  std::size_t n = 0;
  double H = 0.5;
  std::vector<double> entries;  // row-major n x n

  static CovarianceMatrix fbm_grid(double H, std::size_t n);
  double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

/// Lower Cholesky factor. Pivots in [-1e-10, 0) are clamped to zero; a more
/// negative pivot throws NumericError.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const CovarianceMatrix& a);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return l_[i * n_ + j]; }
  /// L z for z a vector of standard normals drawn from rng.
  std::vector<double> sample(RngStream& rng) const;

 private:
  std::size_t n_;
  std::vector<double> l_;
};

inline constexpr std::size_t kOracleMaxSize = 4096;

/// fBm on t_i = i/n, i = 1..n, by Cholesky factorization. Factors are cached
/// per (H, n). Throws std::invalid_argument for n = 0 or n > 4096.
std::vector<double> exact_fbm_sample(double H, std::size_t n, RngStream& rng);

/// Moment of the defining integral by adaptive Gauss–Kronrod on the density
/// with endpoint substitutions (absolute tolerance 1e-11):
///   Half/Super: ∫ (2p-1)^n dm(p)
///   Sub:        n = 0: ∫ dm(p), n >= 1: -∫ p (1-2p)^(n-1) dm(p)
double quadrature_moment(const MeasureSpec& m, std::uint64_t n);

/// ∫ p^n dm(p) by the same quadrature.
double quadrature_power_moment(const MeasureSpec& m, std::uint64_t n);

inline constexpr unsigned kEnumerationMaxSteps = 14;

/// Exact E[Π increments at `indices`] (1-based, repeats allowed) for the
/// quenched walk with persistence p, by summing over every path of length
/// max(indices). CRW increments are ±1. Y increments are built literally from
/// the alternating walk: δ_m = (ε̃_{2m-1} + ε̃_{2m}) / (2√p), where odd steps
/// after the first reverse the previous one and even steps repeat it with
/// probability p. Throws std::invalid_argument beyond 14 steps.
double enumerate_quenched(WalkKind kind, double p, std::span<const unsigned> indices);

/// Exact law of the first L lattice increments (CRW: ±1; Y: δ·√p in {-1,0,1})
/// built from the same literal path enumeration.
std::map<std::vector<int>, double> enumerate_increment_law(WalkKind kind, double p, unsigned L);

}  // namespace fbm
