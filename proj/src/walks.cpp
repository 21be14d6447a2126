#include "fbm/walks.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fbm {

WalkKind walk_kind_for(Regime r) { return r == Regime::Sub ? WalkKind::Y : WalkKind::CRW; }

WalkState start_walk(WalkKind kind, double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("persistence must lie in [0, 1], got " + std::to_string(p));
  if (kind == WalkKind::Y && p == 0.0) throw std::invalid_argument("Y walk needs p > 0");
  WalkState s;
  s.kind = kind;
  s.p = p;
  s.unit = kind == WalkKind::Y ? 1.0 / std::sqrt(p) : 1.0;
  s.last_sign = rng.uniform() < 0.5 ? 1 : -1;
  return s;
}

int crw_next(WalkState& s, RngStream& rng) { return step_lattice(s, rng); }

double y_next(WalkState& s, RngStream& rng) { return static_cast<double>(step_lattice(s, rng)) * s.unit; }

std::vector<double> run_walk(WalkKind kind, double p, std::uint64_t N, RngStream& rng) {
  WalkState s = start_walk(kind, p, rng);
  std::vector<double> out;
  out.reserve(N);
  for (std::uint64_t i = 0; i < N; ++i) out.push_back(static_cast<double>(step_lattice(s, rng)) * s.unit);
  return out;
}

std::vector<std::uint32_t> sample_first_run_lengths(const MeasureSpec& m, std::uint64_t count, std::uint32_t cap,
                                                    std::uint64_t seed) {
  if (m.regime() == Regime::Sub) throw std::invalid_argument("run lengths are defined for the CRW regimes only");
  PersistenceSampler draw(m);
  std::vector<std::uint32_t> lengths(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    const std::uint64_t key = stream_key(seed, j);
    RngStream prng(stream_key(key, 0));
    RngStream srng(stream_key(key, 1));
    WalkState s = start_walk(WalkKind::CRW, draw(prng), srng);
    const int first = s.last_sign;
    std::uint32_t len = 0;
    while (len < cap && crw_next(s, srng) == first) ++len;
    lengths[j] = len;
  }
  return lengths;
}

}  // namespace fbm
