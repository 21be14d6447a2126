#include "fbm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "fbm/quadrature.hpp"
#include "fbm/special.hpp"

namespace fbm {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::MuBase: return "mu-base";
    case Family::MuK: return "mu-k";
    case Family::MuPrimeK: return "mu-prime-k";
    case Family::NuK: return "nu-k";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Sub: return "sub";
    case Regime::Half: return "half";
    case Regime::Super: return "super";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "mu-base") return Family::MuBase;
  if (name == "mu-k") return Family::MuK;
  if (name == "mu-prime-k") return Family::MuPrimeK;
  if (name == "nu-k") return Family::NuK;
  throw std::invalid_argument("unknown measure family '" + std::string(name) + "'");
}

HurstParam::HurstParam(double h) : h_(h) {
  if (!(h >= kMin && h <= kMax)) {
    throw std::invalid_argument("Hurst parameter must lie in [0.01, 0.99], got " + std::to_string(h));
  }
  regime_ = h < 0.5 ? Regime::Sub : (h == 0.5 ? Regime::Half : Regime::Super);
}

MeasureSpec make_measure(Family family, double H, double k) {
  HurstParam hurst(H);
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("shape parameter k must be positive and finite");
  if (family == Family::NuK && hurst.regime() == Regime::Half) {
    throw std::invalid_argument("nu-k is only defined for H != 1/2");
  }
  if (family == Family::MuBase) k = 1.0;
  return MeasureSpec{family, hurst, k};
}

namespace {

// (k+1)^a - k^a
double first_difference_pow(double k, double a) { return std::pow(k, a) * std::expm1(a * std::log1p(1.0 / k)); }

// Base constant of the limit theorems (k = 1).
double base_constant(double H, Regime r) {
  switch (r) {
    case Regime::Super: return std::sqrt(H * (2 * H - 1) / std::exp(log_gamma(3 - 2 * H)));
    case Regime::Half: return 1.0 / std::sqrt(2.0);
    case Regime::Sub: return std::sqrt(2 * H / std::exp(log_gamma(2 - 2 * H)));
  }
  return 0.0;
}

// ln(1/x) given x and 1 - x, accurate at both ends.
double log_inverse(double x, double one_minus_x) { return x < 0.5 ? -std::log(x) : -std::log1p(-one_minus_x); }

// u^(1/k) and 1 - u^(1/k) from u and 1 - u.
std::pair<double, double> root_and_complement(double u, double one_minus_u, double k) {
  const double log_u = u < 0.5 ? std::log(u) : std::log1p(-one_minus_u);
  const double s = std::exp(log_u / k);
  const double v = s > 0.5 ? -std::expm1(log_u / k) : 1.0 - s;
  return {s, v};
}

// MuPrimeK: r(n) integrated over the uniform variable of the sampling transform.
double mu_prime_autocovariance(const MeasureSpec& m, std::uint64_t n) {
  if (n == 0) return 1.0;
  const double H = m.H();
  const double k = m.k;
  const double nn = static_cast<double>(n);
  const double alpha_lo = k > 1.0 ? 1.0 / k : 1.0;
  quad::Result res;
  if (m.regime() == Regime::Sub) {
    const double c = 1.0 / (1.0 - 2 * H);
    auto g = [&](double, double u, double one_minus_u) {
      const auto [s, v] = root_and_complement(u, one_minus_u, k);
      // p = v^c / 2, 1 - 2p = 1 - v^c
      const double vc = std::pow(v, c);
      const double one_minus_vc = s < 0.5 ? -std::expm1(c * std::log1p(-s)) : 1.0 - vc;
      if (n == 1) return -0.5 * vc;
      if (one_minus_vc <= 0.0) return 0.0;
      return -0.5 * vc * std::exp((nn - 1.0) * std::log(one_minus_vc));
    };
    res = quad::integrate_singular(g, 0.0, 1.0, alpha_lo, 1.0);
  } else {
    const double inv_b = 1.0 / (2 - 2 * H);
    auto g = [&](double, double u, double one_minus_u) {
      const auto [s, v] = root_and_complement(u, one_minus_u, k);
      // 2p - 1 = 1 - v^(1/b)
      const double w = std::pow(v, inv_b);
      const double log_x = w < 0.5 ? std::log1p(-w) : std::log(-std::expm1(inv_b * std::log1p(-s)));
      return std::exp(nn * log_x);
    };
    res = quad::integrate_singular(g, 0.0, 1.0, alpha_lo, 1.0);
  }
  return res.value;
}

double lower_mu_k_autocovariance(const MeasureSpec& m, std::uint64_t n) {
  // -E[p (1-2p)^(n-1)] with 2p ~ Beta(1-2H, k)
  const double H = m.H();
  const double k = m.k;
  const double nn = static_cast<double>(n);
  return -0.5 * std::exp(log_beta(2 - 2 * H, k + nn - 1.0) - log_beta(1 - 2 * H, k));
}

double upper_mu_k_autocovariance(const MeasureSpec& m, std::uint64_t n) {
  // E[X^n] with X = 2p - 1 ~ Beta(k, 2-2H)
  const double k = m.k;
  const double nn = static_cast<double>(n);
  if (m.regime() == Regime::Half) return k / (k + nn);
  const double b = 2 - 2 * m.H();
  return std::exp(log_gamma(k + nn) - log_gamma(k) + log_gamma(k + b) - log_gamma(k + nn + b));
}

double nu_autocovariance(const MeasureSpec& m, std::uint64_t n) {
  const double a = 2 * m.H();
  const double k = m.k;
  const double nn = static_cast<double>(n);
  if (m.regime() == Regime::Super) return second_difference_pow(nn + k + 1.0, a) / second_difference_pow(k + 1.0, a);
  return second_difference_pow(nn + k, a) / (2.0 * first_difference_pow(k, a));
}

}  // namespace

ScalingConstant scaling_constant(const MeasureSpec& m) {
  const double H = m.H();
  const double k = m.k;
  const Regime r = m.regime();
  switch (m.family) {
    case Family::MuBase: return {base_constant(H, r), ConstantKind::CH};
    case Family::MuK:
      switch (r) {
        case Regime::Super: return {std::sqrt(H * (2 * H - 1) * gamma_ratio(k, k + 2 - 2 * H)), ConstantKind::CHk};
        case Regime::Half: return {1.0 / std::sqrt(2.0 * k), ConstantKind::CHk};
        case Regime::Sub: return {std::sqrt(2 * H * gamma_ratio(k, k + 1 - 2 * H)), ConstantKind::CHk};
      }
      break;
    case Family::MuPrimeK: return {base_constant(H, r) / std::sqrt(k), ConstantKind::CPrimeHk};
    case Family::NuK:
      if (r == Regime::Super) return {std::sqrt(second_difference_pow(k + 1.0, 2 * H) / 2.0), ConstantKind::CDoublePrimeHk};
      return {std::sqrt(first_difference_pow(k, 2 * H)), ConstantKind::CDoublePrimeHk};
  }
  throw std::logic_error("scaling_constant: unhandled family");
}

double increment_autocovariance(const MeasureSpec& m, std::uint64_t n) {
  if (n == 0) return 1.0;
  switch (m.family) {
    case Family::MuBase:
    case Family::MuK:
      return m.regime() == Regime::Sub ? lower_mu_k_autocovariance(m, n) : upper_mu_k_autocovariance(m, n);
    case Family::MuPrimeK: return mu_prime_autocovariance(m, n);
    case Family::NuK: return nu_autocovariance(m, n);
  }
  throw std::logic_error("increment_autocovariance: unhandled family");
}

std::vector<double> autocovariance_sequence(const MeasureSpec& m, std::uint64_t n_max) {
  std::vector<double> r(n_max + 1);
  r[0] = 1.0;
  if (n_max == 0) return r;
  const double k = m.k;
  const double H = m.H();
  const bool beta_family = m.family == Family::MuBase || m.family == Family::MuK;
  if (beta_family && m.regime() == Regime::Super) {
    const double b = 2 - 2 * H;
    for (std::uint64_t n = 0; n < n_max; ++n) {
      const double nn = static_cast<double>(n);
      r[n + 1] = r[n] * (k + nn) / (k + nn + b);
    }
  } else if (beta_family && m.regime() == Regime::Sub) {
    r[1] = lower_mu_k_autocovariance(m, 1);
    for (std::uint64_t n = 1; n < n_max; ++n) {
      const double nn = static_cast<double>(n);
      r[n + 1] = r[n] * (k + nn - 1.0) / (k + nn + 1.0 - 2 * H);
    }
  } else {
    for (std::uint64_t n = 1; n <= n_max; ++n) r[n] = increment_autocovariance(m, n);
  }
  return r;
}

EndpointExponents endpoint_exponents(const MeasureSpec& m) {
  const double H = m.H();
  const double k = m.family == Family::MuBase ? 1.0 : m.k;
  switch (m.regime()) {
    case Regime::Super: return {k, 2 - 2 * H};
    case Regime::Half: return {k, 1.0};
    case Regime::Sub: return {1 - 2 * H, k};
  }
  return {1.0, 1.0};
}

double density(const MeasureSpec& m, double p, double gap_lo, double gap_hi) {
  (void)p;
  const double H = m.H();
  const double k = m.k;
  const Regime r = m.regime();
  if (r != Regime::Sub) {
    // support [1/2, 1]: gap_lo = p - 1/2, gap_hi = 1 - p
    const double b = 2 - 2 * H;
    switch (m.family) {
      case Family::MuBase:
        if (r == Regime::Half) return 2.0;
        return (1 - H) * std::pow(2.0, 3 - 2 * H) * std::pow(gap_hi, 1 - 2 * H);
      case Family::MuK: {
        const double norm = std::pow(2.0, k + 1 - 2 * H) * std::exp(log_gamma(k + b) - log_gamma(k) - log_gamma(b));
        return norm * std::pow(gap_lo, k - 1) * std::pow(gap_hi, 1 - 2 * H);
      }
      case Family::MuPrimeK: {
        // W = 2(1-p) has density k b (1 - w^b)^(k-1) w^(b-1)
        const double w = 2 * gap_hi;
        const double one_minus_wb = w < 0.5 ? 1.0 - std::pow(w, b) : -std::expm1(b * std::log1p(-2 * gap_lo));
        return 2.0 * k * b * std::pow(one_minus_wb, k - 1) * std::pow(w, b - 1);
      }
      case Family::NuK: {
        const double norm = 16 * H * (2 * H - 1) / std::exp(log_gamma(2 - 2 * H)) / second_difference_pow(k + 1.0, 2 * H);
        const double x = 2 * gap_lo;
        return norm * gap_hi * gap_hi * std::pow(x, k - 1) * std::pow(log_inverse(x, 2 * gap_hi), -1 - 2 * H);
      }
    }
  } else {
    // support [0, 1/2]: gap_lo = p, gap_hi = 1/2 - p
    switch (m.family) {
      case Family::MuBase: return (1 - 2 * H) * std::pow(2.0, 1 - 2 * H) * std::pow(gap_lo, -2 * H);
      case Family::MuK: {
        const double norm =
            std::pow(2.0, k - 2 * H) * std::exp(log_gamma(k + 1 - 2 * H) - log_gamma(k) - log_gamma(1 - 2 * H));
        return norm * std::pow(gap_hi, k - 1) * std::pow(gap_lo, -2 * H);
      }
      case Family::MuPrimeK: {
        // Y = 2p has density k (1 - y^a)^(k-1) a y^(a-1), a = 1 - 2H
        const double a = 1 - 2 * H;
        const double y = 2 * gap_lo;
        const double one_minus_ya = y < 0.5 ? 1.0 - std::pow(y, a) : -std::expm1(a * std::log1p(-2 * gap_hi));
        return 2.0 * k * a * std::pow(one_minus_ya, k - 1) * std::pow(y, a - 1);
      }
      case Family::NuK: {
        const double norm = 8 * H / std::exp(log_gamma(1 - 2 * H)) / first_difference_pow(k, 2 * H);
        const double y = 2 * gap_hi;
        return norm * gap_lo * std::pow(y, k - 1) * std::pow(log_inverse(y, 2 * gap_lo), -1 - 2 * H);
      }
    }
  }
  throw std::logic_error("density: unhandled family");
}

// ---------------------------------------------------------------------------

InverseCdfTable::InverseCdfTable(const MeasureSpec& m, std::size_t knots) {
  if (knots < 8) throw std::invalid_argument("InverseCdfTable: need at least 8 knots");
  const double lo = m.lower(), hi = m.upper();
  const double half = 0.5 * (hi - lo);
  const auto ex = endpoint_exponents(m);
  const double q_lo = ex.lower < 1.0 ? 1.0 / ex.lower : 1.0;
  const double q_hi = ex.upper < 1.0 ? 1.0 / ex.upper : 1.0;
  const std::size_t cells = knots / 2;
  const double dt = 1.0 / static_cast<double>(cells);
  quad::Options opt;
  opt.abs_tol = 1e-13 / static_cast<double>(cells);

  // Knot positions as (p, gap_lo, gap_hi), from lo to hi.
  struct Knot {
    double p, gap_lo, gap_hi;
  };
  std::vector<Knot> pos;
  pos.reserve(2 * cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    const double g = half * std::pow(static_cast<double>(i) * dt, q_lo);
    pos.push_back({lo + g, g, half + (half - g)});
  }
  for (std::size_t i = cells; i-- > 0;) {
    const double g = half * std::pow(static_cast<double>(i) * dt, q_hi);
    pos.push_back({hi - g, half + (half - g), g});
  }

  auto cell_mass = [&](std::size_t i) {
    // Cells in the lower half are integrated in t with gap_lo = half t^q_lo,
    // cells in the upper half with gap_hi = half s^q_hi.
    if (i < cells) {
      const double t0 = static_cast<double>(i) * dt, t1 = static_cast<double>(i + 1) * dt;
      auto f = [&](double t) {
        const double tq = std::pow(t, q_lo);
        const double gl = half * tq;
        const double jac = half * q_lo * (q_lo == 1.0 ? 1.0 : std::pow(t, q_lo - 1.0));
        return density(m, lo + gl, gl, half + half * (1.0 - tq)) * jac;
      };
      return quad::integrate(f, t0, t1, opt).value;
    }
    const std::size_t j = 2 * cells - 1 - i;  // upper-half index from the top
    const double s0 = static_cast<double>(j) * dt, s1 = static_cast<double>(j + 1) * dt;
    auto f = [&](double s) {
      const double sq = std::pow(s, q_hi);
      const double gh = half * sq;
      const double jac = half * q_hi * (q_hi == 1.0 ? 1.0 : std::pow(s, q_hi - 1.0));
      return density(m, hi - gh, half + half * (1.0 - sq), gh) * jac;
    };
    return quad::integrate(f, s0, s1, opt).value;
  };

  std::vector<double> cum(pos.size(), 0.0);
  for (std::size_t i = 0; i + 1 < pos.size(); ++i) cum[i + 1] = cum[i] + cell_mass(i);
  raw_mass_ = cum.back();
  if (!(raw_mass_ > 0.0) || !std::isfinite(raw_mass_)) throw NumericError("InverseCdfTable: density mass is not finite");

  cdf_.push_back(0.0);
  p_.push_back(pos.front().p);
  std::vector<double> dens;
  dens.push_back(std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < pos.size(); ++i) {
    const double F = i + 1 == pos.size() ? 1.0 : cum[i] / raw_mass_;
    if (F <= cdf_.back()) continue;
    if (pos[i].p <= p_.back()) {
      // knots that round to the same p: keep one, carrying the larger F
      if (cdf_.size() > 1) {
        cdf_.back() = F;
        dens.back() = std::numeric_limits<double>::quiet_NaN();
      }
      continue;
    }
    cdf_.push_back(F);
    p_.push_back(pos[i].p);
    dens.push_back(i + 1 == pos.size() ? std::numeric_limits<double>::quiet_NaN()
                                       : density(m, pos[i].p, pos[i].gap_lo, pos[i].gap_hi) / raw_mass_);
  }
  const std::size_t n = cdf_.size();
  if (n < 2) throw NumericError("InverseCdfTable: degenerate table");

  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (p_[i + 1] - p_[i]) / (cdf_[i + 1] - cdf_[i]);
  slope_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = dens[i];
    if (std::isfinite(d) && d > 0.0 && std::isfinite(1.0 / d)) {
      slope_[i] = 1.0 / d;  // dp/dF
    } else {
      slope_[i] = i == 0 ? secant.front() : (i == n - 1 ? secant.back() : 0.5 * (secant[i - 1] + secant[i]));
    }
  }
  // Fritsch–Carlson limiter keeps every cell monotone.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = slope_[i] / secant[i];
    const double b = slope_[i + 1] / secant[i];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      slope_[i] = tau * a * secant[i];
      slope_[i + 1] = tau * b * secant[i];
    }
  }
}

double InverseCdfTable::quantile(double u) const {
  if (u <= 0.0) return p_.front();
  if (u >= 1.0) return p_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin()) - 1;
  const double h = cdf_[i + 1] - cdf_[i];
  const double t = (u - cdf_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double p = h00 * p_[i] + h10 * h * slope_[i] + h01 * p_[i + 1] + h11 * h * slope_[i + 1];
  return std::clamp(p, p_[i], p_[i + 1]);
}

// ---------------------------------------------------------------------------

namespace {

// log of a Gamma(a, 1) variate (Marsaglia & Tsang 2000).
double log_gamma_variate(double a, RngStream& rng) {
  if (a < 1.0) return log_gamma_variate(a + 1.0, rng) + std::log(rng.uniform_open()) / a;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

constexpr double kTinyPersistence = std::numeric_limits<double>::min();

std::shared_ptr<const InverseCdfTable> cached_table(const MeasureSpec& m) {
  static std::mutex mutex;
  static std::map<std::pair<double, double>, std::shared_ptr<const InverseCdfTable>> cache;
  const auto key = std::make_pair(m.H(), m.k);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const InverseCdfTable>(m);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace

double sample_beta(double a, double b, RngStream& rng) {
  const double la = log_gamma_variate(a, rng);
  const double lb = log_gamma_variate(b, rng);
  const double diff = lb - la;
  if (diff > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(diff));
}

PersistenceSampler::PersistenceSampler(const MeasureSpec& m) : m_(m) {
  if (m.family == Family::NuK) table_ = cached_table(m);
}

double PersistenceSampler::operator()(RngStream& rng) const {
  const double H = m_.H();
  const double k = m_.k;
  const Regime r = m_.regime();
  const bool base = m_.family == Family::MuBase || (m_.family == Family::MuK && k == 1.0);
  double p = 0.0;
  if (base) {
    const double u = rng.uniform_open();
    switch (r) {
      case Regime::Super: p = 1.0 - 0.5 * std::pow(u, 1.0 / (2 - 2 * H)); break;
      case Regime::Half: p = 0.5 + 0.5 * u; break;
      case Regime::Sub: p = 0.5 * std::pow(u, 1.0 / (1 - 2 * H)); break;
    }
  } else if (m_.family == Family::MuK) {
    if (r == Regime::Sub) {
      p = 0.5 * sample_beta(1 - 2 * H, k, rng);
    } else {
      p = 0.5 * (1.0 + sample_beta(k, 2 - 2 * H, rng));
    }
  } else if (m_.family == Family::MuPrimeK) {
    const double v = -std::expm1(std::log(rng.uniform_open()) / k);  // 1 - U^(1/k)
    p = r == Regime::Sub ? 0.5 * std::pow(v, 1.0 / (1 - 2 * H)) : 1.0 - 0.5 * std::pow(v, 1.0 / (2 - 2 * H));
  } else {
    p = table_->quantile(rng.uniform_open());
  }
  return r == Regime::Sub ? std::max(p, kTinyPersistence) : p;
}

double sample_persistence(const MeasureSpec& m, RngStream& rng) { return PersistenceSampler(m)(rng); }

}  // namespace fbm
