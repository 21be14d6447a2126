#include "fbm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fbm {

namespace {

void check_steps(std::uint64_t N) {
  if (N < kPlannerMinSteps) {
    throw std::invalid_argument("accuracy bounds need N >= " + std::to_string(kPlannerMinSteps));
  }
}

}  // namespace

double third_moment_bound(const MeasureSpec& m, std::uint64_t N) {
  check_steps(N);
  const double H = m.H();
  const double c = scaling_constant(m).c;
  const double n = static_cast<double>(N);
  switch (m.regime()) {
    case Regime::Super: return std::sqrt(6 * (2 * H - 1) / ((H + 1) * (2 * H + 1))) * c * std::pow(n, 1 - H);
    case Regime::Half: return c * std::sqrt(2 * n) / std::log(n);
    case Regime::Sub: return std::sqrt(2 * H / (2 * H + 1)) * c * std::pow(n, 0.5 - H);
  }
  return 0.0;
}

double error_bound(const MeasureSpec& m, std::uint64_t N, std::uint64_t M, double constant) {
  if (M == 0) throw std::invalid_argument("error_bound: M must be positive");
  return constant * third_moment_bound(m, N) / std::sqrt(static_cast<double>(M));
}

double displayed_error(const MeasureSpec& m, std::uint64_t N, std::uint64_t M) {
  check_steps(N);
  if (M == 0) throw std::invalid_argument("displayed_error: M must be positive");
  const double H = m.H();
  const double n = static_cast<double>(N);
  const double root_m = std::sqrt(static_cast<double>(M));
  if (m.family == Family::MuBase && m.regime() == Regime::Half) return 1.3 * std::sqrt(n) / (std::log(n) * root_m);
  if (m.family != Family::MuK) return error_bound(m, N, M);
  const double nk = n / m.k;
  switch (m.regime()) {
    case Regime::Super:
      return 0.65 * std::sqrt(6 * H * (2 * H - 1) * (2 * H - 1) / ((H + 1) * (2 * H + 1))) * std::pow(nk, 1 - H) / root_m;
    case Regime::Half: return 0.65 / std::log(n) * std::sqrt(nk) / root_m;
    case Regime::Sub: return 0.65 * std::sqrt(4 * H * H / (2 * H + 1)) * std::pow(nk, 0.5 - H) / root_m;
  }
  return 0.0;
}

double cost_estimate(const MeasureSpec&, std::uint64_t N, std::uint64_t M) {
  return static_cast<double>(N) * static_cast<double>(M) + 2.0 * static_cast<double>(M);
}

double rate_threshold(const MeasureSpec& m, std::uint64_t N) {
  const double n = static_cast<double>(N);
  const double H = m.H();
  switch (m.regime()) {
    case Regime::Super: return std::pow(n, 2 - 2 * H);
    case Regime::Half: {
      const double l = std::log(n);
      return n / (l * l);
    }
    case Regime::Sub: return std::pow(n, 1 - 2 * H);
  }
  return 0.0;
}

bool rate_condition(const MeasureSpec& m, std::uint64_t N, std::uint64_t M, double slack) {
  return static_cast<double>(M) >= slack * rate_threshold(m, N);
}

AccuracyPlan advise(double H, std::uint64_t N, double target_error, const AdviseOptions& opt) {
  if (!(target_error > 0.0 && target_error < 1.0)) throw std::invalid_argument("target error must lie in (0, 1)");
  check_steps(N);
  std::vector<double> ks;
  if (opt.family == Family::MuBase) {
    ks.push_back(1.0);
  } else if (opt.k) {
    ks.push_back(*opt.k);
  } else {
    const double k_max = static_cast<double>(N) / 100.0;
    for (double k = 1.0; k == 1.0 || k <= k_max; k *= 2.0) ks.push_back(k);
  }
  for (double k : ks) {
    const MeasureSpec m = make_measure(opt.family, H, k);
    const double ratio = opt.constant * third_moment_bound(m, N) / target_error;
    const double m_real = std::ceil(ratio * ratio);
    if (!(m_real <= static_cast<double>(opt.max_walks))) continue;
    auto M = static_cast<std::uint64_t>(std::max(1.0, m_real));
    while (error_bound(m, N, M, opt.constant) > target_error) ++M;
    if (M > opt.max_walks) continue;
    AccuracyPlan plan;
    plan.M = M;
    plan.k = m.k;
    plan.family = opt.family;
    plan.predicted_error = error_bound(m, N, M, opt.constant);
    plan.cost_units = cost_estimate(m, N, M);
    plan.rate_condition_ok = rate_condition(m, N, M, opt.slack);
    return plan;
  }
  throw InfeasiblePlan("no admissible k reaches error " + std::to_string(target_error) + " with at most " +
                       std::to_string(opt.max_walks) + " walks");
}

}  // namespace fbm
