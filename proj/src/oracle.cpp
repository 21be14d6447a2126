#include "fbm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "fbm/quadrature.hpp"
#include "fbm/special.hpp"

namespace fbm {

double fbm_covariance(double s, double t, double H) {
  const double a = 2 * H;
  return 0.5 * (std::pow(s, a) + std::pow(t, a) - std::pow(std::abs(s - t), a));
}

double fgn_autocovariance(std::uint64_t n, double H) {
  if (n == 0) return 1.0;
  if (n == 1) return 0.5 * (std::pow(2.0, 2 * H) - 2.0);
  return 0.5 * second_difference_pow(static_cast<double>(n), 2 * H);
}

CovarianceMatrix CovarianceMatrix::fbm_grid(double H, std::size_t n) {
  CovarianceMatrix c;
  c.n = n;
  c.H = H;
  c.entries.resize(n * n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = fbm_covariance(static_cast<double>(i + 1) / dn, static_cast<double>(j + 1) / dn, H);
      c.entries[i * n + j] = v;
      c.entries[j * n + i] = v;
    }
  }
  return c;
}

CholeskyFactor::CholeskyFactor(const CovarianceMatrix& a) : n_(a.n), l_(a.n * a.n, 0.0) {
  constexpr double kPivotClamp = -1e-10;
  for (std::size_t j = 0; j < n_; ++j) {
    const double* lj = &l_[j * n_];
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (d < kPivotClamp) {
      throw NumericError("Cholesky: negative pivot " + std::to_string(d) + " at row " + std::to_string(j));
    }
    const double pivot = d > 0.0 ? std::sqrt(d) : 0.0;
    l_[j * n_ + j] = pivot;
    for (std::size_t i = j + 1; i < n_; ++i) {
      if (pivot == 0.0) continue;
      const double* li = &l_[i * n_];
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l_[i * n_ + j] = s / pivot;
    }
  }
}

std::vector<double> CholeskyFactor::sample(RngStream& rng) const {
  std::vector<double> z(n_);
  for (auto& v : z) v = rng.normal();
  std::vector<double> x(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* li = &l_[i * n_];
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += li[k] * z[k];
    x[i] = s;
  }
  return x;
}

std::vector<double> exact_fbm_sample(double H, std::size_t n, RngStream& rng) {
  if (n == 0 || n > kOracleMaxSize) {
    throw std::invalid_argument("exact_fbm_sample: n must lie in [1, " + std::to_string(kOracleMaxSize) + "]");
  }
  HurstParam hp(H);
  static std::mutex mutex;
  static std::map<std::pair<double, std::size_t>, std::shared_ptr<const CholeskyFactor>> cache;
  std::shared_ptr<const CholeskyFactor> factor;
  {
    std::lock_guard lock(mutex);
    auto& slot = cache[{hp.value(), n}];
    if (!slot) slot = std::make_shared<const CholeskyFactor>(CovarianceMatrix::fbm_grid(hp.value(), n));
    factor = slot;
  }
  return factor->sample(rng);
}

namespace {

quad::Result integrate_against(const MeasureSpec& m, auto&& weight) {
  const auto ex = endpoint_exponents(m);
  auto g = [&](double p, double gap_lo, double gap_hi) {
    return weight(p, gap_lo, gap_hi) * density(m, p, gap_lo, gap_hi);
  };
  return quad::integrate_singular(g, m.lower(), m.upper(), ex.lower, ex.upper);
}

// x^n with log x supplied, exact at n = 0.
double power_from_log(double log_x, std::uint64_t n) {
  return n == 0 ? 1.0 : std::exp(static_cast<double>(n) * log_x);
}

}  // namespace

double quadrature_moment(const MeasureSpec& m, std::uint64_t n) {
  if (m.regime() != Regime::Sub) {
    return integrate_against(m, [n](double, double gl, double gh) {
      // 2p - 1 = 2 gap_lo = 1 - 2 gap_hi
      const double log_x = gh < 0.25 ? std::log1p(-2 * gh) : std::log(2 * gl);
      return power_from_log(log_x, n);
    }).value;
  }
  if (n == 0) return integrate_against(m, [](double, double, double) { return 1.0; }).value;
  return -integrate_against(m, [n](double, double gl, double gh) {
    // p = gap_lo, 1 - 2p = 2 gap_hi
    const double log_y = gl < 0.25 ? std::log1p(-2 * gl) : std::log(2 * gh);
    return gl * power_from_log(log_y, n - 1);
  }).value;
}

double quadrature_power_moment(const MeasureSpec& m, std::uint64_t n) {
  return integrate_against(m, [n, &m](double p, double, double gh) {
    const double log_p = m.regime() == Regime::Sub ? std::log(p) : std::log1p(-gh);
    return power_from_log(log_p, n);
  }).value;
}

namespace {

// Calls visit(increments, probability) for every path of L increments.
// CRW increments are ±1; Y increments are the lattice values ε̃_{2m-1} + ε̃_{2m}
// halved, i.e. in {-1, 0, 1}.
template <class Visit>
void enumerate_paths(WalkKind kind, double p, unsigned L, Visit&& visit) {
  if (L == 0 || L > kEnumerationMaxSteps) {
    throw std::invalid_argument("enumeration supports 1 to " + std::to_string(kEnumerationMaxSteps) + " steps");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("persistence must lie in [0, 1]");
  std::vector<int> inc(L);
  for (int first : {1, -1}) {
    // Bits of `choice` say whether each random step repeats (1) or reverses (0).
    // CRW: steps 2..L are random. Y: the even steps 2, 4, ..., 2L are random.
    const unsigned random_steps = kind == WalkKind::CRW ? L - 1 : L;
    for (std::uint32_t choice = 0; choice < (1u << random_steps); ++choice) {
      double prob = 0.5;
      if (kind == WalkKind::CRW) {
        int e = first;
        inc[0] = e;
        for (unsigned i = 1; i < L; ++i) {
          const bool repeat = (choice >> (i - 1)) & 1u;
          prob *= repeat ? p : 1.0 - p;
          if (!repeat) e = -e;
          inc[i] = e;
        }
      } else {
        int e = first;  // ε̃_1
        for (unsigned m = 0; m < L; ++m) {
          if (m > 0) e = -e;  // odd step after the first reverses
          const int odd = e;
          const bool repeat = (choice >> m) & 1u;
          prob *= repeat ? p : 1.0 - p;
          if (!repeat) e = -e;  // even step
          inc[m] = (odd + e) / 2;
        }
      }
      if (prob != 0.0) visit(inc, prob);
    }
  }
}

}  // namespace

double enumerate_quenched(WalkKind kind, double p, std::span<const unsigned> indices) {
  if (indices.empty()) return 1.0;
  unsigned L = 0;
  for (unsigned i : indices) {
    if (i == 0) throw std::invalid_argument("increment indices are 1-based");
    L = std::max(L, i);
  }
  if (kind == WalkKind::Y && p == 0.0) throw std::invalid_argument("Y walk needs p > 0");
  const double unit = kind == WalkKind::Y ? 1.0 / std::sqrt(p) : 1.0;
  double total = 0.0;
  enumerate_paths(kind, p, L, [&](const std::vector<int>& inc, double prob) {
    double prod = prob;
    for (unsigned i : indices) prod *= static_cast<double>(inc[i - 1]) * unit;
    total += prod;
  });
  return total;
}

std::map<std::vector<int>, double> enumerate_increment_law(WalkKind kind, double p, unsigned L) {
  std::map<std::vector<int>, double> law;
  enumerate_paths(kind, p, L, [&](const std::vector<int>& inc, double prob) { law[inc] += prob; });
  return law;
}

}  // namespace fbm
