#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fbm/quadrature.hpp"

using namespace fbm;

TEST_CASE("smooth integrals") {
  CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(quad::integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0).value ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("endpoint singularities through the substitution") {
  // ∫_0^1 x^(-0.9) dx = 10, ∫_0^1 (1-x)^(-0.5) x^(-0.5) dx = π
  auto r1 = quad::integrate_singular([](double, double gl, double) { return std::pow(gl, -0.9); }, 0.0, 1.0, 0.1, 1.0);
  CHECK(std::abs(r1.value - 10.0) < 1e-9);
  auto r2 = quad::integrate_singular([](double, double gl, double gh) { return 1.0 / std::sqrt(gl * gh); }, 0.0, 1.0,
                                     0.5, 0.5);
  CHECK(std::abs(r2.value - std::numbers::pi) < 1e-10);
}

TEST_CASE("failures are reported") {
  quad::Options opt;
  opt.max_intervals = 5;
  CHECK_THROWS_AS(quad::integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, opt), NumericError);
  CHECK_THROWS_AS(quad::integrate([](double) { return std::nan(""); }, 0.0, 1.0), NumericError);
}
