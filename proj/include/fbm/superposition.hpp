#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fbm/measures.hpp"
#include "fbm/walks.hpp"

namespace fbm {

struct EnsembleConfig {
  MeasureSpec measure;
  std::uint64_t N = 1;  // time steps, grid t_i = i/N
  std::uint64_t M = 1;  // walks
  std::uint64_t master_seed = 0;
};

/// Worker threads; 0 means FBM_THREADS or the hardware concurrency.
/// Results never depend on this.
struct ExecOptions {
  unsigned threads = 0;
};

struct EnsembleTrajectory {
  std::vector<double> values;  // N + 1 entries, values[0] = 0
  EnsembleConfig config;
  double scale = 0.0;
  std::uint64_t draws = 0;  // 64-bit outputs consumed over all walk streams
};

/// c / (N^H √M), or c / (√(N ln N) √M) at H = 1/2, with c the family constant.
/// Throws std::invalid_argument for N = 0, M = 0, or N = 1 at H = 1/2.
double scale_factor(const MeasureSpec& m, std::uint64_t N, std::uint64_t M);

/// Sink for stream_fbm: receives (i, values[i]) for i = 1..N in order.
/// Returning false stops the run.
using StepSink = std::function<bool(std::uint64_t, double)>;

/// Streams the superposed path. Walk j takes its persistence from sub-stream 0
/// of stream_key(master_seed, j) and its steps from sub-stream 1. Walks are
/// grouped in blocks of 1024 and time in chunks; CRW sums are exact integers,
/// Y sums are compensated inside a block and added across blocks by a fixed
/// pairwise tree. State is O(M). Returns the total draw count (also for an
/// aborted run: the draws made so far).
std::uint64_t stream_fbm(const EnsembleConfig& cfg, const StepSink& sink, ExecOptions exec = {});

EnsembleTrajectory simulate_fbm(const EnsembleConfig& cfg, ExecOptions exec = {});

/// Path values (N + 1 entries) of M walks sharing one fixed persistence p,
/// summed and multiplied by `scale`. Same stream layout as simulate_fbm.
std::vector<double> simulate_quenched(WalkKind kind, double p, std::uint64_t N, std::uint64_t M,
                                     std::uint64_t master_seed, double scale, ExecOptions exec = {});

inline constexpr std::uint64_t kWalkBlock = 1024;

}  // namespace fbm
