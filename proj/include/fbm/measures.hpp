#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fbm/rng.hpp"

namespace fbm {

enum class Regime { Sub, Half, Super };

/// Persistence-mixing families.
///  MuBase   – base measure of the limit theorems (uniform on [1/2,1] at H = 1/2)
///  MuK      – law of (1 + Beta(k, 2-2H))/2, or Beta(1-2H, k)/2 below H = 1/2
///  MuPrimeK – inverse-transform family built from 1 - U^(1/k)
///  NuK      – measures whose moments are shifted fractional-Gaussian-noise covariances
enum class Family { MuBase, MuK, MuPrimeK, NuK };

std::string_view to_string(Family f);
std::string_view to_string(Regime r);
/// Accepts "mu-base", "mu-k", "mu-prime-k", "nu-k".
Family parse_family(std::string_view name);

class HurstParam {
 public:
  static constexpr double kMin = 0.01;
  static constexpr double kMax = 0.99;

  /// Throws std::invalid_argument outside [kMin, kMax].
  explicit HurstParam(double h);

  double value() const { return h_; }
  Regime regime() const { return regime_; }

 private:
  double h_;
  Regime regime_;
};

struct MeasureSpec {
  Family family;
  HurstParam hurst;
  double k;  // always 1 for MuBase

  Regime regime() const { return hurst.regime(); }
  double H() const { return hurst.value(); }
  /// Support of the measure: [1/2, 1] for Half/Super, [0, 1/2] for Sub.
  double lower() const { return regime() == Regime::Sub ? 0.0 : 0.5; }
  double upper() const { return regime() == Regime::Sub ? 0.5 : 1.0; }
};

/// Validates and builds a MeasureSpec. Errors: H outside [0.01, 0.99],
/// k <= 0 or non-finite, NuK at H = 1/2.
MeasureSpec make_measure(Family family, double H, double k = 1.0);

enum class ConstantKind { CH, CHk, CPrimeHk, CDoublePrimeHk };

struct ScalingConstant {
  double c;
  ConstantKind definition;
};

ScalingConstant scaling_constant(const MeasureSpec& m);

/// Annealed increment autocovariance r(n).
///  Half/Super: r(n) = ∫ (2p-1)^n dμ(p)
///  Sub:        r(0) = 1, r(n) = -∫ p (1-2p)^(n-1) dμ(p)
/// Closed forms for MuBase/MuK/NuK; MuPrimeK integrates through its sampling
/// transform and may throw NumericError.
double increment_autocovariance(const MeasureSpec& m, std::uint64_t n);

/// r(0), ..., r(n_max) using ratio recurrences where available.
std::vector<double> autocovariance_sequence(const MeasureSpec& m, std::uint64_t n_max);

/// Density of m at p (with p = lower + gap_lo = upper - gap_hi), written in
/// the form the measure is defined with. Used by the quadrature oracle.
double density(const MeasureSpec& m, double p, double gap_lo, double gap_hi);

/// Power-law exponents alpha at the support endpoints: density ~ gap^(alpha-1).
struct EndpointExponents {
  double lower, upper;
};
EndpointExponents endpoint_exponents(const MeasureSpec& m);

/// Monotone inverse-CDF table for measures without a closed-form sampler.
///
/// Knots are placed on a power grid towards each endpoint so that every cell
/// carries comparable mass; cell masses come from adaptive quadrature of the
/// density and the quantile is a Fritsch–Carlson monotone cubic in the CDF.
class InverseCdfTable {
 public:
  static constexpr std::size_t kDefaultKnots = 4096;

  InverseCdfTable(const MeasureSpec& m, std::size_t knots = kDefaultKnots);

  double quantile(double u) const;
  const std::vector<double>& cdf_knots() const { return cdf_; }
  const std::vector<double>& p_knots() const { return p_; }
  /// Integral of the density before normalisation (should be 1).
  double raw_mass() const { return raw_mass_; }

 private:
  std::vector<double> cdf_, p_, slope_;
  double raw_mass_ = 0.0;
};

/// Draws persistence values for a fixed measure. Construction may build an
/// inverse-CDF table (NuK); draws are const and thread-safe.
class PersistenceSampler {
 public:
  explicit PersistenceSampler(const MeasureSpec& m);

  double operator()(RngStream& rng) const;
  const MeasureSpec& measure() const { return m_; }

 private:
  MeasureSpec m_;
  std::shared_ptr<const InverseCdfTable> table_;
};

/// One draw from m. NuK tables are cached per (H, k).
double sample_persistence(const MeasureSpec& m, RngStream& rng);

/// Beta(a, b) variate by the ratio of two Marsaglia–Tsang gamma variates
/// (boosted for shapes below one). Valid for all a, b > 0.
double sample_beta(double a, double b, RngStream& rng);

}  // namespace fbm
