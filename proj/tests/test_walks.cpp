#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "fbm/oracle.hpp"
#include "fbm/walks.hpp"

using namespace fbm;

namespace {

// Mean of f over R independent runs, with a 3-SE band.
template <class F>
std::pair<double, double> monte_carlo(int R, std::uint64_t seed, F&& f) {
  double s = 0.0, ss = 0.0;
  for (int r = 0; r < R; ++r) {
    RngStream rng(stream_key(seed, static_cast<std::uint64_t>(r)));
    const double v = f(rng);
    s += v;
    ss += v * v;
  }
  const double m = s / R;
  return {m, 3.0 * std::sqrt((ss / R - m * m) / R)};
}

}  // namespace

TEST_CASE("full and zero persistence") {
  RngStream rng(3);
  RngStream probe = rng;
  const int first = probe.uniform() < 0.5 ? 1 : -1;
  const auto full = run_walk(WalkKind::CRW, 1.0, 5, rng);
  for (double d : full) CHECK(d == first);

  const auto alt = run_walk(WalkKind::CRW, 0.0, 8, rng);
  for (std::size_t i = 1; i < alt.size(); ++i) CHECK(alt[i] == -alt[i - 1]);

  RngStream yrng(4);
  RngStream yprobe = yrng;
  const double s0 = yprobe.uniform() < 0.5 ? 1.0 : -1.0;
  const auto y = run_walk(WalkKind::Y, 1.0, 4, yrng);
  CHECK(y == std::vector<double>{s0, -s0, s0, -s0});
}

TEST_CASE("start_walk validation") {
  RngStream rng(1);
  CHECK_THROWS_AS(start_walk(WalkKind::Y, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(start_walk(WalkKind::CRW, 1.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(start_walk(WalkKind::CRW, -0.1, rng), std::invalid_argument);
  CHECK_NOTHROW(start_walk(WalkKind::CRW, 0.0, rng));
}

TEST_CASE("run_walk equals step-by-step calls and uses N + 1 draws") {
  for (WalkKind kind : {WalkKind::CRW, WalkKind::Y}) {
    RngStream a(77), b(77);
    const auto batch = run_walk(kind, 0.3, 1000, a);
    WalkState s = start_walk(kind, 0.3, b);
    for (double d : batch) {
      const double step = kind == WalkKind::CRW ? static_cast<double>(crw_next(s, b)) : y_next(s, b);
      CHECK(step == d);
    }
    CHECK(a.draws() == 1001);
    CHECK(b.draws() == 1001);
    CHECK(s.step_index == 1000);
  }
}

TEST_CASE("CRW lattice invariants") {
  RngStream rng(8);
  WalkState s = start_walk(WalkKind::CRW, 0.6, rng);
  for (int i = 0; i < 5000; ++i) {
    crw_next(s, rng);
    CHECK(std::llabs(s.lattice) <= static_cast<long long>(s.step_index));
    CHECK((s.lattice - static_cast<std::int64_t>(s.step_index)) % 2 == 0);
  }
}

TEST_CASE("quenched Monte Carlo moments") {
  const auto crw13 = monte_carlo(1000000, 1, [](RngStream& rng) {
    const auto e = run_walk(WalkKind::CRW, 0.7, 3, rng);
    return e[0] * e[2];
  });
  CHECK(std::abs(crw13.first - 0.16) < crw13.second);

  const auto y12 = monte_carlo(1000000, 2, [](RngStream& rng) {
    const auto d = run_walk(WalkKind::Y, 0.3, 2, rng);
    return d[0] * d[1];
  });
  CHECK(std::abs(y12.first + 0.3) < y12.second);

  for (double p : {0.1, 0.5, 0.9}) {
    const auto y2 = monte_carlo(1000000, 3, [p](RngStream& rng) {
      const auto d = run_walk(WalkKind::Y, p, 1, rng);
      return d[0] * d[0];
    });
    CHECK(std::abs(y2.first - 1.0) < y2.second);
  }

  const auto lag1 = monte_carlo(200000, 4, [](RngStream& rng) {
    const auto e = run_walk(WalkKind::CRW, 0.5, 2, rng);
    return e[0] * e[1];
  });
  CHECK(std::abs(lag1.first) < lag1.second);
}

TEST_CASE("Y paths take two values per excursion with geometric sojourns") {
  for (double p : {0.2, 0.6}) {
    RngStream rng(21);
    WalkState s = start_walk(WalkKind::Y, p, rng);
    const double unit = 1.0 / std::sqrt(p);
    std::int64_t lo = 0, hi = 0;
    std::uint64_t sojourns = 0, steps = 0, run = 0;
    std::int64_t prev = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      const double d = y_next(s, rng);
      CHECK_UNARY(d == 0.0 || std::abs(std::abs(d) - unit) < 1e-12);
      lo = std::min(lo, s.lattice);
      hi = std::max(hi, s.lattice);
      ++run;
      if (s.lattice != prev) {
        ++sojourns;
        steps += run;
        run = 0;
      }
      prev = s.lattice;
    }
    CHECK(hi - lo == 1);
    const double mean = static_cast<double>(steps) / static_cast<double>(sojourns);
    // geometric on {1, 2, ...} with success probability p: mean 1/p, sd √(1-p)/p
    CHECK(std::abs(mean - 1.0 / p) < 4.0 * std::sqrt(1 - p) / p / std::sqrt(static_cast<double>(sojourns)));
  }
}

TEST_CASE("reduced Y recursion has the law of the literal alternating walk") {
  for (double p : {0.2, 0.5}) {
    const unsigned L = 6;
    const auto literal = enumerate_increment_law(WalkKind::Y, p, L);
    // exhaustive law of the reduced two-state recursion
    std::map<std::vector<int>, double> reduced;
    for (int s0 : {1, -1}) {
      for (unsigned mask = 0; mask < (1u << L); ++mask) {
        int s = s0;
        double prob = 0.5;
        std::vector<int> inc(L);
        for (unsigned i = 0; i < L; ++i) {
          const bool hit = (mask >> i) & 1u;
          prob *= hit ? p : 1 - p;
          inc[i] = hit ? s : 0;
          if (hit) s = -s;
        }
        reduced[inc] += prob;
      }
    }
    CHECK(reduced.size() == literal.size());
    for (const auto& [path, prob] : literal) {
      CHECK(reduced[path] == doctest::Approx(prob).epsilon(1e-14));
    }
    // and the implementation samples that law
    std::map<std::vector<int>, int> counts;
    const int R = 200000;
    for (int r = 0; r < R; ++r) {
      RngStream rng(stream_key(99, static_cast<std::uint64_t>(r)));
      WalkState s = start_walk(WalkKind::Y, p, rng);
      std::vector<int> inc(L);
      for (unsigned i = 0; i < L; ++i) inc[i] = step_lattice(s, rng);
      ++counts[inc];
    }
    double chi2 = 0.0;
    for (const auto& [path, prob] : literal) {
      const double e = prob * R;
      chi2 += (counts[path] - e) * (counts[path] - e) / e;
    }
    // 128 cells at most; the 0.999 quantile of chi2(127) is about 186
    CHECK(chi2 < 186.0);
  }
}

TEST_CASE("rise lengths are geometric given p") {
  const auto m = make_measure(Family::MuBase, 0.5);
  const auto len = sample_first_run_lengths(m, 1000, 1u << 20, 5);
  CHECK(len.size() == 1000);
  CHECK_THROWS_AS(sample_first_run_lengths(make_measure(Family::MuBase, 0.3), 10, 100, 1), std::invalid_argument);
  // under uniform p on [1/2, 1]: P(L >= 1) = E[p] = 3/4
  const auto many = sample_first_run_lengths(m, 200000, 1000, 6);
  double hits = 0;
  for (auto l : many) hits += l >= 1;
  CHECK(std::abs(hits / 200000 - 0.75) < 4 * std::sqrt(0.75 * 0.25 / 200000));
}
