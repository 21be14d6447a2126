#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbm/oracle.hpp"
#include "fbm/special.hpp"

using namespace fbm;

TEST_CASE("fBm covariance and fGn autocovariance") {
  for (double H : {0.2, 0.5, 0.9}) CHECK(fbm_covariance(1, 1, H) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fbm_covariance(1, 2, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fbm_covariance(1, 2, 0.75) == doctest::Approx(std::pow(2.0, 1.5) / 2).epsilon(1e-15));
  CHECK(fgn_autocovariance(0, 0.3) == 1.0);
  for (unsigned n = 1; n < 10; ++n) CHECK(std::abs(fgn_autocovariance(n, 0.5)) < 1e-15);
  CHECK(fgn_autocovariance(1, 0.75) == doctest::Approx(0.41421356237).epsilon(1e-10));
  for (double H : {0.25, 0.75}) {
    CHECK(fgn_autocovariance(10000, H) * std::pow(1e4, 2 - 2 * H) == doctest::Approx(H * (2 * H - 1)).epsilon(0.01));
  }
}

TEST_CASE("Cholesky factor reproduces the matrix; pivots are guarded") {
  const auto a = CovarianceMatrix::fbm_grid(0.7, 32);
  const CholeskyFactor l(a);
  double worst = 0.0;
  for (std::size_t i = 0; i < 32; ++i) {
    for (std::size_t j = 0; j < 32; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 32; ++k) s += l(i, k) * l(j, k);
      worst = std::max(worst, std::abs(s - a(i, j)));
    }
  }
  CHECK(worst < 1e-13);

  CovarianceMatrix bad;
  bad.n = 2;
  bad.entries = {1.0, 2.0, 2.0, 1.0};
  CHECK_THROWS_AS(CholeskyFactor{bad}, NumericError);
  CovarianceMatrix edge;  // rank one with a round-off negative pivot
  edge.n = 2;
  edge.entries = {1.0, 1.0, 1.0, 1.0 - 1e-12};
  CHECK_NOTHROW(CholeskyFactor{edge});
}

TEST_CASE("exact samples: covariance, Brownian increments, determinism") {
  const std::size_t n = 16;
  const int R = 10000;
  std::vector<double> s(n * n, 0.0), ss(n * n, 0.0);
  RngStream rng(1);
  for (int r = 0; r < R; ++r) {
    const auto x = exact_fbm_sample(0.7, n, rng);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        s[i * n + j] += x[i] * x[j];
        ss[i * n + j] += x[i] * x[j] * x[i] * x[j];
      }
    }
  }
  double worst_z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double m = s[i * n + j] / R;
      const double se = std::sqrt((ss[i * n + j] / R - m * m) / R);
      const double t = fbm_covariance((i + 1.0) / n, (j + 1.0) / n, 0.7);
      worst_z = std::max(worst_z, std::abs(m - t) / se);
    }
  }
  CHECK(worst_z < 4.0);

  RngStream b(2);
  double lag = 0.0, var = 0.0;
  for (int r = 0; r < 4000; ++r) {
    const auto x = exact_fbm_sample(0.5, 64, b);
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      const double d0 = x[i] - x[i - 1], d1 = x[i + 1] - x[i];
      lag += d0 * d1;
      var += d0 * d0;
    }
  }
  const double rho = lag / var;
  CHECK(std::abs(rho) < 2.576 / std::sqrt(4000.0 * 62));

  RngStream c1(5), c2(5);
  CHECK(exact_fbm_sample(0.3, 100, c1) == exact_fbm_sample(0.3, 100, c2));
  CHECK_THROWS_AS(exact_fbm_sample(0.3, 4097, c1), std::invalid_argument);
  CHECK_THROWS_AS(exact_fbm_sample(0.3, 0, c1), std::invalid_argument);
}

TEST_CASE("quadrature moments") {
  CHECK(quadrature_moment(make_measure(Family::MuBase, 0.75), 0) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(quadrature_moment(make_measure(Family::MuBase, 0.75), 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  CHECK(quadrature_moment(make_measure(Family::NuK, 0.25, 1.0), 1) ==
        doctest::Approx((std::sqrt(3.0) - 2 * std::sqrt(2.0) + 1) / (2 * (std::sqrt(2.0) - 1))).epsilon(1e-10));
  // ∫ p^n dμ for the base measure at H = 0.75, n = 100
  CHECK(quadrature_power_moment(make_measure(Family::MuBase, 0.75), 100) ==
        doctest::Approx(0.12486385602102242508).epsilon(1e-9));
}

TEST_CASE("ν moment identity to 1e-8 for n <= 50") {
  for (double H : {0.1, 0.25, 0.4, 0.6, 0.75, 0.9}) {
    for (double k : {0.5, 1.0, 2.0, 8.0}) {
      const auto m = make_measure(Family::NuK, H, k);
      for (unsigned n = 0; n <= 50; ++n) CHECK(std::abs(quadrature_moment(m, n) - increment_autocovariance(m, n)) < 1e-8);
    }
  }
}

TEST_CASE("quenched enumeration") {
  const unsigned i13[] = {1, 3}, i12[] = {1, 2}, i11[] = {1, 1};
  CHECK(std::abs(enumerate_quenched(WalkKind::CRW, 0.7, i13) - 0.16) < 1e-12);
  CHECK(std::abs(enumerate_quenched(WalkKind::CRW, 0.5, i12)) < 1e-12);
  CHECK(std::abs(enumerate_quenched(WalkKind::Y, 0.3, i12) + 0.3) < 1e-12);
  for (double p : {0.125, 0.5, 0.875, 1.0}) CHECK(std::abs(enumerate_quenched(WalkKind::Y, p, i11) - 1.0) < 1e-12);

  for (double p : {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875}) {
    for (unsigned m = 1; m <= 3; ++m) {
      for (unsigned n = 1; n <= 8; ++n) {
        const unsigned idx[] = {m, m + n};
        CHECK(std::abs(enumerate_quenched(WalkKind::CRW, p, idx) - std::pow(2 * p - 1, n)) < 1e-12);
        CHECK(std::abs(enumerate_quenched(WalkKind::Y, p, idx) + p * std::pow(1 - 2 * p, n - 1.0)) < 1e-12);
      }
    }
  }
  const unsigned too_long[] = {1, 15};
  CHECK_THROWS_AS(enumerate_quenched(WalkKind::CRW, 0.5, too_long), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_quenched(WalkKind::Y, 0.0, i12), std::invalid_argument);
}

TEST_CASE("fourth moments factorize for separated pairs") {
  const unsigned L = 10;
  for (double p : {0.25, 0.5, 0.75}) {
    auto rp = [p](unsigned n) { return n == 0 ? 1.0 : -p * std::pow(1 - 2 * p, n - 1.0); };
    auto cp = [p](unsigned n) { return std::pow(2 * p - 1, n); };
    double worst_y = 0.0, worst_crw = 0.0;
    for (unsigned i1 = 1; i1 <= L; ++i1) {
      for (unsigned i2 = 1; i2 <= i1; ++i2) {
        for (unsigned i3 = 1; i3 <= i2; ++i3) {
          for (unsigned i4 = 1; i4 <= i3; ++i4) {
            const unsigned idx[] = {i1, i2, i3, i4};
            worst_crw = std::max(worst_crw,
                                 std::abs(enumerate_quenched(WalkKind::CRW, p, idx) - cp(i1 - i2) * cp(i3 - i4)));
            if (i3 < i2) {
              worst_y = std::max(worst_y,
                                 std::abs(enumerate_quenched(WalkKind::Y, p, idx) - rp(i1 - i2) * rp(i3 - i4)));
            }
          }
        }
      }
    }
    CHECK(worst_crw < 1e-12);
    CHECK(worst_y < 1e-12);
  }
  // with a shared middle index the factorization does not hold
  const unsigned tie[] = {3, 2, 2, 1};
  CHECK(std::abs(enumerate_quenched(WalkKind::Y, 0.25, tie) - 0.25 * 0.25) > 1e-3);
}
