#include <doctest.h>

#include <cmath>

#include "fbm/rng.hpp"

using namespace fbm;

TEST_CASE("stream keys follow the documented mixing") {
  static_assert(stream_key(7, 0) == mix64(7 + kGolden64));
  CHECK(stream_key(7, 3) == mix64(7 + 4 * kGolden64));
  CHECK(stream_key(1, 0) != stream_key(0, 1));
}

TEST_CASE("same key gives the same sequence; draws are counted") {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  CHECK(a.draws() == 100);
}

TEST_CASE("uniform ranges") {
  RngStream r(1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform_open();
    CHECK_UNARY(u > 0.0);
    CHECK_UNARY(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal deviates have unit variance") {
  RngStream r(9);
  double s = 0.0, ss = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(ss / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
