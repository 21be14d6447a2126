#pragma once

#include <cstdint>
#include <vector>

#include "fbm/measures.hpp"
#include "fbm/rng.hpp"

namespace fbm {

/// CRW: correlated random walk, increments ±1 repeating the last one with
/// probability p. Y: normalized pair process of the alternating walk,
/// increments in {-1/√p, 0, +1/√p}.
enum class WalkKind { CRW, Y };

/// CRW for Half/Super, Y for Sub.
WalkKind walk_kind_for(Regime r);

/// O(1) state of one quenched walk.
///
/// The position is kept on an integer lattice: CRW positions are the lattice
/// value itself, Y positions are lattice / √p.
struct WalkState {
  WalkKind kind = WalkKind::CRW;
  double p = 0.5;
  double unit = 1.0;  // 1 for CRW, 1/√p for Y
  int last_sign = 1;
  std::int64_t lattice = 0;
  std::uint64_t step_index = 0;

  double position() const { return static_cast<double>(lattice) * unit; }
};

/// Validates p and draws the initial sign with one uniform (u < 1/2 gives +1).
/// CRW accepts p in [0, 1]; Y needs p in (0, 1]. Throws std::invalid_argument.
WalkState start_walk(WalkKind kind, double p, RngStream& rng);

/// One CRW step; returns the increment ±1. Uses one uniform: u < p repeats.
int crw_next(WalkState& s, RngStream& rng);

/// One step of the reduced Y recursion; returns the increment.
/// u < p emits last_sign/√p and flips the sign, otherwise emits 0.
double y_next(WalkState& s, RngStream& rng);

/// Lattice increment (±1 or 0) of one step of either kind.
inline int step_lattice(WalkState& s, RngStream& rng) {
  const bool hit = rng.uniform() < s.p;
  int d;
  if (s.kind == WalkKind::CRW) {
    if (!hit) s.last_sign = -s.last_sign;
    d = s.last_sign;
  } else if (hit) {
    d = s.last_sign;
    s.last_sign = -s.last_sign;
  } else {
    d = 0;
  }
  s.lattice += d;
  ++s.step_index;
  return d;
}

/// N increments of a fresh walk (initial sign drawn from rng first).
std::vector<double> run_walk(WalkKind kind, double p, std::uint64_t N, RngStream& rng);

/// Rise lengths for `count` annealed CRW walks: the number of leading steps
/// that repeat the initial sign, so P(L >= n | p) = p^n. Each walk has its own
/// persistence from m. Lengths are truncated at `cap`.
/// Walk j uses the streams of ensemble walk j under `seed`.
std::vector<std::uint32_t> sample_first_run_lengths(const MeasureSpec& m, std::uint64_t count, std::uint32_t cap,
                                                    std::uint64_t seed);

}  // namespace fbm
