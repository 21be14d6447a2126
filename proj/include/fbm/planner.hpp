#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "fbm/measures.hpp"

namespace fbm {

/// Berry–Esseen constant used for all error bounds.
inline constexpr double kBerryEsseenConstant = 0.65;
/// Esseen's conjectured optimal constant (3 + √10) / (6 √(2π)), optional.
inline constexpr double kEsseenConjecturedConstant = 0.40973218437532223;
/// Bounds are asymptotic in N; smaller N is rejected.
inline constexpr std::uint64_t kPlannerMinSteps = 64;

class InfeasiblePlan : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bound on the normalized third absolute moment of one walk at t = 1:
///   Super: √(6(2H-1)/((H+1)(2H+1))) c N^(1-H)
///   Half:  c √(2N) / ln N
///   Sub:   √(2H/(2H+1)) c N^(1/2-H)
/// with c the family constant. Throws std::invalid_argument for N < 64.
double third_moment_bound(const MeasureSpec& m, std::uint64_t N);

/// constant * third_moment_bound / √M.
double error_bound(const MeasureSpec& m, std::uint64_t N, std::uint64_t M, double constant = kBerryEsseenConstant);

/// The closed-form error expression printed for each family in the source
/// material (asymptotic in k, and with 1.3 for the base measure at H = 1/2).
/// Diagnostic only; error_bound is authoritative.
double displayed_error(const MeasureSpec& m, std::uint64_t N, std::uint64_t M);

/// Exact uniform-draw count N·M + 2M (steps, initial signs, one persistence
/// draw per walk for the inverse-transform samplers).
double cost_estimate(const MeasureSpec& m, std::uint64_t N, std::uint64_t M);

/// Walk count below which the diffusive-limit condition fails:
/// N^(2-2H) (Super), N / ln(N)^2 (Half), N^(1-2H) (Sub).
double rate_threshold(const MeasureSpec& m, std::uint64_t N);
/// M >= slack * rate_threshold.
bool rate_condition(const MeasureSpec& m, std::uint64_t N, std::uint64_t M, double slack = 1.0);

struct AccuracyPlan {
  std::uint64_t M = 0;
  double k = 1.0;
  Family family = Family::MuK;
  double predicted_error = 0.0;
  double cost_units = 0.0;
  bool rate_condition_ok = false;
};

struct AdviseOptions {
  Family family = Family::MuK;
  std::optional<double> k;  // searched over 1, 2, 4, ... (k <= N/100) when absent
  std::uint64_t max_walks = 10'000'000;
  double slack = 1.0;
  double constant = kBerryEsseenConstant;
};

/// Smallest M meeting the target for the first admissible k. Throws
/// InfeasiblePlan when every admissible k needs more than max_walks, and
/// std::invalid_argument for a target outside (0, 1).
AccuracyPlan advise(double H, std::uint64_t N, double target_error, const AdviseOptions& opt = {});

}  // namespace fbm
