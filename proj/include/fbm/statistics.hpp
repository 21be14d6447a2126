#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbm/measures.hpp"

namespace fbm {

/// Replications in rows.
using SampleRows = std::vector<std::vector<double>>;

struct LagEstimate {
  std::uint64_t lag = 0;
  double estimate = 0.0;
  double se = 0.0;
};

/// Autocovariance of centred stationary increments. Each replication gives
/// the mean of x_i x_{i+n} over its window; the estimate is the mean over
/// replications and the standard error their spread / √R.
/// Needs R >= 30 rows of equal length and max_lag < length / 4; throws
/// std::invalid_argument otherwise or when every input value is zero.
std::vector<LagEstimate> empirical_autocovariance(const SampleRows& increments, std::uint64_t max_lag);

/// Sums over n steps, one value per observation.
struct ScaleSample {
  std::uint64_t n = 0;
  std::vector<double> values;
};

struct HurstEstimate {
  double H_hat = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  double confidence = 0.95;
  std::vector<double> log_n, log_var;
};

/// Half the least-squares slope of log mean-square against log n. The
/// interval uses the slope's residual standard error and a Student t quantile
/// with (scales - 2) degrees of freedom. Needs >= 4 scales and >= 100 values
/// per scale.
HurstEstimate estimate_hurst(const std::vector<ScaleSample>& scales, double confidence = 0.95);

/// Non-overlapping increments X(t + n) - X(t) of each path (values at t_i =
/// i/N, N + 1 entries) for dyadic n from min_lag up to N.
std::vector<ScaleSample> variance_time_scales(const SampleRows& paths, std::uint64_t min_lag = 16);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t n = 0;
};

/// Kolmogorov distribution tail P(K > x) = 2 Σ (-1)^(j-1) exp(-2 j² x²).
double kolmogorov_tail(double x);

/// One-sample KS test against N(0, target_variance); p-value from the
/// asymptotic law at (√n + 0.12 + 0.11/√n) D. Needs >= 500 samples.
KsResult marginal_normality(std::vector<double> samples, double target_variance = 1.0);

struct RiseTailRow {
  std::uint64_t n = 0;
  double empirical = 0.0;  // fraction of lengths >= n
  double scaled = 0.0;     // n^(2-2H) · empirical
  double reference = 0.0;  // stated limit: Γ(3-2H), or 1 at H = 1/2
  double exact = 0.0;      // n^(2-2H) ∫ p^n dm, by quadrature
};

/// Needs regime Half or Super and >= 1e5 lengths.
std::vector<RiseTailRow> rise_tail_report(const std::vector<std::uint32_t>& lengths, const MeasureSpec& m,
                                          const std::vector<std::uint64_t>& ns);

struct CovarianceGrid {
  std::vector<double> times;
  std::vector<double> estimate, theory, se;  // row-major, times.size()^2
  double max_abs_error = 0.0;
  double max_z = 0.0;
};

/// Empirical E[X(s) X(t)] over replications on s, t = j/points (j = 1..points)
/// against the fBm covariance. Paths carry N + 1 values with N divisible by
/// `points`.
CovarianceGrid covariance_grid(const SampleRows& paths, double H, std::size_t points = 8);

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_most = true;  // pass iff value <= threshold, else value >= threshold
  bool pass() const { return at_most ? value <= threshold : value >= threshold; }
};

struct AutocovRow {
  std::uint64_t lag = 0;
  double estimate = 0.0, se = 0.0;
  double theory = 0.0;  // c² r(n) of the construction
  double fgn = 0.0;     // limit covariance
};

struct ValidationReport {
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<AutocovRow> autocov;
  CovarianceGrid covariance;
  HurstEstimate hurst;
  bool has_ks = false;
  KsResult ks;
  std::vector<RiseTailRow> rise_tail;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  /// One key=value pair per line; doubles with 17 significant digits.
  std::string to_kv() const;
  static ValidationReport from_kv(const std::string& text);
};

}  // namespace fbm
