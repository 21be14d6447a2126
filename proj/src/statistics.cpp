#include "fbm/statistics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fbm/oracle.hpp"
#include "fbm/special.hpp"

namespace fbm {

namespace {

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Mean and standard error of the mean.
std::pair<double, double> mean_se(const std::vector<double>& x) {
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::vector<LagEstimate> empirical_autocovariance(const SampleRows& increments, std::uint64_t max_lag) {
  const std::size_t R = increments.size();
  if (R < 30) throw std::invalid_argument("empirical_autocovariance: need at least 30 replications");
  const std::size_t N = increments.front().size();
  for (const auto& row : increments) {
    if (row.size() != N) throw std::invalid_argument("empirical_autocovariance: rows differ in length");
  }
  if (!(4 * max_lag < N)) throw std::invalid_argument("empirical_autocovariance: max_lag must be below N/4");
  const bool all_zero = std::all_of(increments.begin(), increments.end(), [](const auto& row) {
    return std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
  });
  if (all_zero) throw std::invalid_argument("empirical_autocovariance: degenerate (zero-variance) input");

  std::vector<LagEstimate> out;
  std::vector<double> per_rep(R);
  for (std::uint64_t lag = 0; lag <= max_lag; ++lag) {
    const std::size_t count = N - static_cast<std::size_t>(lag);
    for (std::size_t r = 0; r < R; ++r) {
      const auto& x = increments[r];
      double s = 0.0;
      for (std::size_t i = 0; i < count; ++i) s += x[i] * x[i + lag];
      per_rep[r] = s / static_cast<double>(count);
    }
    const auto [m, se] = mean_se(per_rep);
    out.push_back({lag, m, se});
  }
  return out;
}

HurstEstimate estimate_hurst(const std::vector<ScaleSample>& scales, double confidence) {
  if (scales.size() < 4) throw std::invalid_argument("estimate_hurst: need at least 4 scales");
  HurstEstimate h;
  h.confidence = confidence;
  for (const auto& s : scales) {
    if (s.values.size() < 100) throw std::invalid_argument("estimate_hurst: need at least 100 values per scale");
    double ms = 0.0;
    for (double v : s.values) ms += v * v;
    ms /= static_cast<double>(s.values.size());
    if (!(ms > 0.0)) throw std::invalid_argument("estimate_hurst: zero variance at a scale");
    h.log_n.push_back(std::log(static_cast<double>(s.n)));
    h.log_var.push_back(std::log(ms));
  }
  const std::size_t k = h.log_n.size();
  const double xm = mean_of(h.log_n), ym = mean_of(h.log_var);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (h.log_n[i] - xm) * (h.log_n[i] - xm);
    sxy += (h.log_n[i] - xm) * (h.log_var[i] - ym);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = h.log_var[i] - (ym + slope * (h.log_n[i] - xm));
    rss += e * e;
  }
  const double df = static_cast<double>(k) - 2.0;
  const double slope_se = std::sqrt(rss / df / sxx);
  const double t = boost::math::quantile(boost::math::students_t(df), 0.5 + 0.5 * confidence);
  h.H_hat = 0.5 * slope;
  h.ci_low = h.H_hat - 0.5 * t * slope_se;
  h.ci_high = h.H_hat + 0.5 * t * slope_se;
  return h;
}

std::vector<ScaleSample> variance_time_scales(const SampleRows& paths, std::uint64_t min_lag) {
  if (paths.empty()) throw std::invalid_argument("variance_time_scales: no paths");
  const std::uint64_t N = paths.front().size() - 1;
  std::vector<ScaleSample> out;
  for (std::uint64_t n = std::max<std::uint64_t>(min_lag, 1); n <= N; n *= 2) {
    ScaleSample s{n, {}};
    for (const auto& x : paths) {
      for (std::uint64_t t = 0; t + n <= N; t += n) s.values.push_back(x[t + n] - x[t]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series converges slowly; the tail is 1 to double precision here
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult marginal_normality(std::vector<double> samples, double target_variance) {
  if (samples.size() < 500) throw std::invalid_argument("marginal_normality: need at least 500 samples");
  if (!(target_variance > 0.0)) throw std::invalid_argument("marginal_normality: variance must be positive");
  std::sort(samples.begin(), samples.end());
  const double sd = std::sqrt(target_variance);
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = 0.5 * std::erfc(-samples[i] / (sd * std::numbers::sqrt2));
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  return {d, kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d), samples.size()};
}

std::vector<RiseTailRow> rise_tail_report(const std::vector<std::uint32_t>& lengths, const MeasureSpec& m,
                                          const std::vector<std::uint64_t>& ns) {
  if (m.regime() == Regime::Sub) throw std::invalid_argument("rise_tail_report: needs H >= 1/2");
  if (lengths.size() < 100000) throw std::invalid_argument("rise_tail_report: need at least 1e5 runs");
  const double H = m.H();
  const double expo = m.regime() == Regime::Half ? 1.0 : 2 - 2 * H;
  const double reference = m.regime() == Regime::Half ? 1.0 : std::exp(log_gamma(3 - 2 * H));
  std::vector<RiseTailRow> rows;
  for (std::uint64_t n : ns) {
    const auto hits = std::count_if(lengths.begin(), lengths.end(), [n](std::uint32_t l) { return l >= n; });
    RiseTailRow row;
    row.n = n;
    row.empirical = static_cast<double>(hits) / static_cast<double>(lengths.size());
    const double w = std::pow(static_cast<double>(n), expo);
    row.scaled = w * row.empirical;
    row.reference = reference;
    row.exact = w * quadrature_power_moment(m, n);
    rows.push_back(row);
  }
  return rows;
}

CovarianceGrid covariance_grid(const SampleRows& paths, double H, std::size_t points) {
  if (paths.size() < 2 || points == 0) throw std::invalid_argument("covariance_grid: need paths and grid points");
  const std::size_t N = paths.front().size() - 1;
  if (N % points != 0) throw std::invalid_argument("covariance_grid: N must be divisible by the grid size");
  CovarianceGrid g;
  for (std::size_t j = 1; j <= points; ++j) g.times.push_back(static_cast<double>(j) / static_cast<double>(points));
  const std::size_t P = points, stride = N / points;
  g.estimate.resize(P * P);
  g.theory.resize(P * P);
  g.se.resize(P * P);
  std::vector<double> prod(paths.size());
  for (std::size_t a = 0; a < P; ++a) {
    for (std::size_t b = 0; b < P; ++b) {
      for (std::size_t r = 0; r < paths.size(); ++r) prod[r] = paths[r][(a + 1) * stride] * paths[r][(b + 1) * stride];
      const auto [m, se] = mean_se(prod);
      const std::size_t idx = a * P + b;
      g.estimate[idx] = m;
      g.se[idx] = se;
      g.theory[idx] = fbm_covariance(g.times[a], g.times[b], H);
      const double err = std::abs(m - g.theory[idx]);
      g.max_abs_error = std::max(g.max_abs_error, err);
      g.max_z = std::max(g.max_z, se > 0.0 ? err / se : (err > 0.0 ? INFINITY : 0.0));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

bool ValidationReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass(); });
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put(std::ostringstream& os, const std::string& key, const std::string& value) { os << key << '=' << value << '\n'; }
void put(std::ostringstream& os, const std::string& key, double value) { put(os, key, num(value)); }
void put_u(std::ostringstream& os, const std::string& key, std::uint64_t value) { put(os, key, std::to_string(value)); }

void put_list(std::ostringstream& os, const std::string& key, const std::vector<double>& v) {
  put_u(os, key + ".count", v.size());
  for (std::size_t i = 0; i < v.size(); ++i) put(os, key + "." + std::to_string(i), v[i]);
}

class KvReader {
 public:
  explicit KvReader(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("report line without '=': " + line);
      kv_[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  const std::string& str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("report is missing key '" + key + "'");
    return it->second;
  }
  double d(const std::string& key) const { return std::stod(str(key)); }
  std::uint64_t u(const std::string& key) const { return std::stoull(str(key)); }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> v(u(key + ".count"));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = d(key + "." + std::to_string(i));
    return v;
  }
  const std::map<std::string, std::string>& all() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace

std::string ValidationReport::to_kv() const {
  std::ostringstream os;
  put_u(os, "param.count", parameters.size());
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    put(os, "param." + std::to_string(i) + ".name", parameters[i].first);
    put(os, "param." + std::to_string(i) + ".value", parameters[i].second);
  }
  put_u(os, "autocov.count", autocov.size());
  for (std::size_t i = 0; i < autocov.size(); ++i) {
    const std::string k = "autocov." + std::to_string(i);
    const auto& r = autocov[i];
    put_u(os, k + ".lag", r.lag);
    put(os, k + ".estimate", r.estimate);
    put(os, k + ".se", r.se);
    put(os, k + ".theory", r.theory);
    put(os, k + ".fgn", r.fgn);
  }
  put_list(os, "covariance.times", covariance.times);
  put_list(os, "covariance.estimate", covariance.estimate);
  put_list(os, "covariance.theory", covariance.theory);
  put_list(os, "covariance.se", covariance.se);
  put(os, "covariance.max_abs_error", covariance.max_abs_error);
  put(os, "covariance.max_z", covariance.max_z);
  put(os, "hurst.H_hat", hurst.H_hat);
  put(os, "hurst.ci_low", hurst.ci_low);
  put(os, "hurst.ci_high", hurst.ci_high);
  put(os, "hurst.confidence", hurst.confidence);
  put_list(os, "hurst.log_n", hurst.log_n);
  put_list(os, "hurst.log_var", hurst.log_var);
  put_u(os, "ks.present", has_ks ? 1 : 0);
  if (has_ks) {
    put(os, "ks.statistic", ks.statistic);
    put(os, "ks.p_value", ks.p_value);
    put_u(os, "ks.n", ks.n);
  }
  put_u(os, "rise.count", rise_tail.size());
  for (std::size_t i = 0; i < rise_tail.size(); ++i) {
    const std::string k = "rise." + std::to_string(i);
    const auto& r = rise_tail[i];
    put_u(os, k + ".n", r.n);
    put(os, k + ".empirical", r.empirical);
    put(os, k + ".scaled", r.scaled);
    put(os, k + ".reference", r.reference);
    put(os, k + ".exact", r.exact);
  }
  put_u(os, "verdict.count", verdicts.size());
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const std::string k = "verdict." + std::to_string(i);
    const auto& v = verdicts[i];
    put(os, k + ".name", v.name);
    put(os, k + ".value", v.value);
    put(os, k + ".threshold", v.threshold);
    put(os, k + ".rule", v.at_most ? "at_most" : "at_least");
    put(os, k + ".pass", v.pass() ? "yes" : "no");
  }
  put(os, "overall", all_pass() ? "pass" : "fail");
  return os.str();
}

ValidationReport ValidationReport::from_kv(const std::string& text) {
  const KvReader in(text);
  ValidationReport rep;
  for (std::size_t i = 0, n = in.u("param.count"); i < n; ++i) {
    const std::string k = "param." + std::to_string(i);
    rep.parameters.emplace_back(in.str(k + ".name"), in.str(k + ".value"));
  }
  for (std::size_t i = 0, n = in.u("autocov.count"); i < n; ++i) {
    const std::string k = "autocov." + std::to_string(i);
    rep.autocov.push_back({in.u(k + ".lag"), in.d(k + ".estimate"), in.d(k + ".se"), in.d(k + ".theory"),
                           in.d(k + ".fgn")});
  }
  rep.covariance.times = in.list("covariance.times");
  rep.covariance.estimate = in.list("covariance.estimate");
  rep.covariance.theory = in.list("covariance.theory");
  rep.covariance.se = in.list("covariance.se");
  rep.covariance.max_abs_error = in.d("covariance.max_abs_error");
  rep.covariance.max_z = in.d("covariance.max_z");
  rep.hurst.H_hat = in.d("hurst.H_hat");
  rep.hurst.ci_low = in.d("hurst.ci_low");
  rep.hurst.ci_high = in.d("hurst.ci_high");
  rep.hurst.confidence = in.d("hurst.confidence");
  rep.hurst.log_n = in.list("hurst.log_n");
  rep.hurst.log_var = in.list("hurst.log_var");
  rep.has_ks = in.u("ks.present") != 0;
  if (rep.has_ks) rep.ks = {in.d("ks.statistic"), in.d("ks.p_value"), static_cast<std::size_t>(in.u("ks.n"))};
  for (std::size_t i = 0, n = in.u("rise.count"); i < n; ++i) {
    const std::string k = "rise." + std::to_string(i);
    rep.rise_tail.push_back(
        {in.u(k + ".n"), in.d(k + ".empirical"), in.d(k + ".scaled"), in.d(k + ".reference"), in.d(k + ".exact")});
  }
  for (std::size_t i = 0, n = in.u("verdict.count"); i < n; ++i) {
    const std::string k = "verdict." + std::to_string(i);
    const std::string& rule = in.str(k + ".rule");
    if (rule != "at_most" && rule != "at_least") throw std::invalid_argument("unknown verdict rule '" + rule + "'");
    rep.verdicts.push_back({in.str(k + ".name"), in.d(k + ".value"), in.d(k + ".threshold"), rule == "at_most"});
  }
  return rep;
}

}  // namespace fbm
