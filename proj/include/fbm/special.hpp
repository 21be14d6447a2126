#pragma once

#include <stdexcept>
#include <string>

namespace fbm {

/// Thrown when a numerical routine cannot reach its stated accuracy.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// ln Γ(x) for x > 0.
///
/// Lanczos approximation (g = 7, nine terms) away from the zeros of ln Γ at
/// x = 1 and x = 2; around those points a Taylor series in ζ values keeps the
/// result relatively accurate. Throws std::invalid_argument for x <= 0.
double log_gamma(double x);

/// ln B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// Γ(a)/Γ(b) evaluated through log_gamma.
double gamma_ratio(double a, double b);

/// (x+1)^a - 2 x^a + (x-1)^a for x >= 1, a > 0, without the catastrophic
/// cancellation of the naive expression at large x.
double second_difference_pow(double x, double a);

}  // namespace fbm
