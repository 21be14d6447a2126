#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fbm/special.hpp"

namespace fbm::quad {

struct Options {
  double abs_tol = 1e-11;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

namespace detail {

// 21-point Kronrod / 10-point Gauss pair (QUADPACK dqk21 constants).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.14887433898163121088482600112972,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.03255816230796472747881897245939,
    0.05475589657435199603138130024458,  0.07503967481091995276704314091619,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
};

template <class F>
Segment kronrod21(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  std::array<double, 10> fv1{}, fv2{};
  const double fc = f(centr);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double resabs = std::abs(resk);
  for (int j = 0; j < 5; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 5; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * kXgk[jtwm1];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double result = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) abserr = std::max(eps * 50.0 * resabs, abserr);
  if (!std::isfinite(result) || !std::isfinite(abserr)) {
    throw NumericError("quadrature: non-finite integrand value on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return {a, b, result, abserr};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (G10/K21) integration of f over [a, b].
/// The interval with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |I|). Throws NumericError otherwise.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  if (a == b) return {};
  std::vector<detail::Segment> heap;
  heap.reserve(64);
  const auto by_error = [](const detail::Segment& x, const detail::Segment& y) { return x.error < y.error; };
  heap.push_back(detail::kronrod21(f, a, b));
  double total = heap.front().value;
  double err = heap.front().error;
  // Segments too narrow to split are retired here.
  double frozen_value = 0.0, frozen_error = 0.0;
  int count = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (heap.empty() || count >= opt.max_intervals) {
      throw NumericError("quadrature: tolerance not met (estimate " + std::to_string(err) + " after " +
                         std::to_string(count) + " intervals)");
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      frozen_value += worst.value;
      frozen_error += worst.error;
      if (frozen_error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        throw NumericError("quadrature: interval underflow before tolerance was met");
      }
      continue;
    }
    const auto left = detail::kronrod21(f, worst.a, mid);
    const auto right = detail::kronrod21(f, mid, worst.b);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++count;
    // Re-sum to avoid drift from incremental updates.
    total = frozen_value;
    err = frozen_error;
    for (const auto& s : heap) {
      total += s.value;
      err += s.error;
    }
  }
  return {total, err, count};
}

/// Integrates g(x, x - a, b - x) over [a, b] where g may carry power-law
/// endpoint behaviour g ~ (x - a)^(alpha_lo - 1) and g ~ (b - x)^(alpha_hi - 1).
///
/// The interval is split at its midpoint; on each half the substitution
/// gap = half_width * t^q with q = 1/alpha (alpha < 1) makes the transformed
/// integrand bounded. The gaps are passed to g exactly so that densities can
/// be evaluated near an endpoint without cancellation.
template <class G>
Result integrate_singular(G&& g, double a, double b, double alpha_lo, double alpha_hi, const Options& opt = {}) {
  if (!(b > a)) throw std::invalid_argument("integrate_singular: requires a < b");
  const double half = 0.5 * (b - a);
  const double q_lo = alpha_lo < 1.0 ? 1.0 / alpha_lo : 1.0;
  const double q_hi = alpha_hi < 1.0 ? 1.0 / alpha_hi : 1.0;

  Options sub = opt;
  sub.abs_tol = 0.5 * opt.abs_tol;

  auto left = [&](double t) {
    const double tq = std::pow(t, q_lo);
    const double gap_lo = half * tq;
    const double gap_hi = half + half * (1.0 - tq);
    const double jac = half * q_lo * (q_lo == 1.0 ? 1.0 : std::pow(t, q_lo - 1.0));
    return g(a + gap_lo, gap_lo, gap_hi) * jac;
  };
  auto right = [&](double s) {
    const double sq = std::pow(s, q_hi);
    const double gap_hi = half * sq;
    const double gap_lo = half + half * (1.0 - sq);
    const double jac = half * q_hi * (q_hi == 1.0 ? 1.0 : std::pow(s, q_hi - 1.0));
    return g(b - gap_hi, gap_lo, gap_hi) * jac;
  };
  const Result l = integrate(left, 0.0, 1.0, sub);
  const Result r = integrate(right, 0.0, 1.0, sub);
  return {l.value + r.value, l.abs_error + r.abs_error, l.intervals + r.intervals};
}

}  // namespace fbm::quad
