#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbm/oracle.hpp"
#include "fbm/statistics.hpp"
#include "fbm/walks.hpp"

using namespace fbm;

namespace {

SampleRows exact_paths(double H, std::size_t n, int R, std::uint64_t seed) {
  SampleRows rows;
  RngStream rng(seed);
  for (int r = 0; r < R; ++r) {
    std::vector<double> p{0.0};
    const auto x = exact_fbm_sample(H, n, rng);
    p.insert(p.end(), x.begin(), x.end());
    rows.push_back(std::move(p));
  }
  return rows;
}

}  // namespace

TEST_CASE("autocovariance estimator on oracle increments") {
  const auto paths = exact_paths(0.75, 128, 500, 1);
  SampleRows inc;
  const double norm = std::pow(128.0, 0.75);
  for (const auto& p : paths) {
    std::vector<double> d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back((p[i] - p[i - 1]) * norm);
    inc.push_back(d);
  }
  const auto ac = empirical_autocovariance(inc, 8);
  CHECK(ac.size() == 9);
  CHECK(std::abs(ac[1].estimate - 0.41421356) < 4 * ac[1].se);

  RngStream rng(2);
  SampleRows white(100, std::vector<double>(256));
  for (auto& row : white) for (auto& v : row) v = rng.normal();
  for (const auto& e : empirical_autocovariance(white, 10)) {
    if (e.lag > 0) CHECK(std::abs(e.estimate) < 4 * e.se);
  }

  CHECK_THROWS_AS(empirical_autocovariance(SampleRows(40, std::vector<double>(64, 0.0)), 4), std::invalid_argument);
  CHECK_THROWS_AS(empirical_autocovariance(SampleRows(10, std::vector<double>(64, 1.0)), 4), std::invalid_argument);
  CHECK_THROWS_AS(empirical_autocovariance(SampleRows(40, std::vector<double>(64, 1.0)), 16), std::invalid_argument);
}

TEST_CASE("Hurst estimation on oracle paths") {
  const auto h07 = estimate_hurst(variance_time_scales(exact_paths(0.7, 1024, 200, 3)));
  CHECK(h07.H_hat >= 0.65);
  CHECK(h07.H_hat <= 0.75);
  CHECK(h07.ci_low < h07.H_hat);
  CHECK(h07.ci_high > h07.H_hat);
  const auto h05 = estimate_hurst(variance_time_scales(exact_paths(0.5, 1024, 200, 4)));
  CHECK(h05.H_hat >= 0.46);
  CHECK(h05.H_hat <= 0.54);
  const auto few = variance_time_scales(exact_paths(0.5, 64, 200, 5));
  CHECK(few.size() == 3);
  CHECK_THROWS_AS(estimate_hurst(few), std::invalid_argument);
}

TEST_CASE("Kolmogorov tail") {
  CHECK(kolmogorov_tail(0.8) == doctest::Approx(0.5441424115741981).epsilon(1e-12));
  CHECK(kolmogorov_tail(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-12));
  CHECK(kolmogorov_tail(1.63) == doctest::Approx(0.009846364888486529).epsilon(1e-12));
  CHECK(kolmogorov_tail(0.0) == 1.0);
}

TEST_CASE("KS normality calibration") {
  int accepted = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(stream_key(6, t));
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.normal();
    accepted += marginal_normality(x, 1.0).p_value > 0.01;
  }
  CHECK(accepted >= 0.98 * trials);
  CHECK(marginal_normality(std::vector<double>(1000, 0.3), 1.0).p_value < 1e-10);
  CHECK_THROWS_AS(marginal_normality(std::vector<double>(499, 0.0), 1.0), std::invalid_argument);
  RngStream rng(7);
  std::vector<double> wide(5000);
  for (auto& v : wide) v = 1.3 * rng.normal();
  CHECK(marginal_normality(wide, 1.0).p_value < 0.01);
  CHECK(marginal_normality(wide, 1.69).p_value > 0.01);
}

TEST_CASE("rise tail report") {
  const auto m = make_measure(Family::MuBase, 0.75);
  const auto len = sample_first_run_lengths(m, 100000, 2000, 8);
  const auto rows = rise_tail_report(len, m, {10, 100});
  CHECK(rows.size() == 2);
  CHECK(rows[1].reference == doctest::Approx(0.886226925).epsilon(1e-8));
  CHECK(rows[1].exact == doctest::Approx(10 * 0.12486385602102242508).epsilon(1e-8));
  const double se = 10 * std::sqrt(rows[1].empirical * (1 - rows[1].empirical) / 1e5);
  CHECK(std::abs(rows[1].scaled - rows[1].exact) < 4 * se);
  CHECK_THROWS_AS(rise_tail_report(len, make_measure(Family::MuBase, 0.25), {10}), std::invalid_argument);
  CHECK_THROWS_AS(rise_tail_report(std::vector<std::uint32_t>(10, 1), m, {10}), std::invalid_argument);
  const auto half = make_measure(Family::MuBase, 0.5);
  CHECK(rise_tail_report(sample_first_run_lengths(half, 100000, 2000, 9), half, {100})[0].reference == 1.0);
}

TEST_CASE("covariance grid on oracle paths") {
  for (double H : {0.25, 0.75}) {
    const auto g = covariance_grid(exact_paths(H, 256, 400, 10), H, 8);
    CHECK(g.times.size() == 8);
    CHECK(g.times.back() == 1.0);
    CHECK(g.max_z < 4.0);
  }
  CHECK_THROWS_AS(covariance_grid(exact_paths(0.5, 100, 10, 1), 0.5, 8), std::invalid_argument);
}

TEST_CASE("validation reports round-trip exactly") {
  ValidationReport rep;
  rep.parameters = {{"hurst", "0.75"}, {"family", "mu-k"}};
  rep.autocov = {{0, 1.0 / 3.0, 0.01, 0.4, 1.0}, {1, -1e-300, 2.5e-7, 0.1, 0.41421356237309503}};
  rep.covariance.times = {0.5, 1.0};
  rep.covariance.estimate = {0.1, 0.2, 0.2, 1.0 / 7.0};
  rep.covariance.theory = {0.1, 0.2, 0.2, 0.9};
  rep.covariance.se = {0.01, 0.01, 0.01, 0.01};
  rep.covariance.max_abs_error = 0.01;
  rep.covariance.max_z = 3.14159;
  rep.hurst = {0.7123, 0.69, 0.73, 0.95, {1, 2}, {3, 4}};
  rep.has_ks = true;
  rep.ks = {0.0123, 0.5, 1000};
  rep.rise_tail = {{100, 0.1, 1.0, 0.886, 1.25}};
  rep.verdicts = {{"cov", 3.14159, 4.0, true}, {"ks", 0.5, 0.01, false}, {"hurst", 0.06, 0.05, true}};
  const std::string text = rep.to_kv();
  const auto back = ValidationReport::from_kv(text);
  CHECK(back.to_kv() == text);
  CHECK(back.autocov[1].estimate == -1e-300);
  CHECK(back.covariance.estimate[3] == 1.0 / 7.0);
  CHECK(back.verdicts[0].pass());
  CHECK(back.verdicts[1].pass());
  CHECK_FALSE(back.verdicts[2].pass());
  CHECK_FALSE(back.all_pass());
  CHECK_THROWS_AS(ValidationReport::from_kv("param.count=0\n"), std::invalid_argument);
}
