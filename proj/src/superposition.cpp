#include "fbm/superposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thread_pool.hpp"

namespace fbm {

double scale_factor(const MeasureSpec& m, std::uint64_t N, std::uint64_t M) {
  if (N == 0 || M == 0) throw std::invalid_argument("scale_factor: N and M must be positive");
  const double c = scaling_constant(m).c;
  const double n = static_cast<double>(N);
  const double root_m = std::sqrt(static_cast<double>(M));
  if (m.regime() == Regime::Half) {
    if (N == 1) throw std::invalid_argument("scale_factor: N = 1 at H = 1/2 (ln 1 = 0)");
    return c / (std::sqrt(n * std::log(n)) * root_m);
  }
  return c / (std::pow(n, m.H()) * root_m);
}

namespace {

constexpr std::uint64_t kChunk = 128;

struct Walker {
  WalkState state;
  RngStream rng;
};

double pairwise_sum(const double* x, std::size_t n) {
  if (n == 1) return x[0];
  if (n == 2) return x[0] + x[1];
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

// Core driver. `persistence(j, rng)` returns walk j's p; rng is sub-stream 0.
template <class Persistence>
std::uint64_t run_ensemble(WalkKind kind, std::uint64_t N, std::uint64_t M, std::uint64_t seed, double scale,
                           Persistence&& persistence, const StepSink& sink, ExecOptions exec) {
  if (N == 0 || M == 0) throw std::invalid_argument("ensemble needs N >= 1 and M >= 1");
  const std::size_t blocks = static_cast<std::size_t>((M + kWalkBlock - 1) / kWalkBlock);
  const unsigned threads = std::min<unsigned>(detail::resolve_threads(exec.threads), static_cast<unsigned>(blocks));
  auto& pool = detail::pool_for(std::max(1u, threads));

  std::vector<Walker> walkers;
  walkers.reserve(static_cast<std::size_t>(M));
  for (std::uint64_t j = 0; j < M; ++j) walkers.push_back({WalkState{}, RngStream(0)});
  std::vector<std::uint64_t> persistence_draws(blocks, 0);

  pool.run(blocks, [&](std::size_t b) {
    const std::uint64_t lo = b * kWalkBlock, hi = std::min<std::uint64_t>(M, lo + kWalkBlock);
    for (std::uint64_t j = lo; j < hi; ++j) {
      const std::uint64_t key = stream_key(seed, j);
      RngStream prng(stream_key(key, 0));
      const double p = persistence(j, prng);
      persistence_draws[b] += prng.draws();
      Walker& w = walkers[static_cast<std::size_t>(j)];
      w.rng = RngStream(stream_key(key, 1));
      w.state = start_walk(kind, p, w.rng);
    }
  });

  const std::size_t T = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, N));
  // Per block and chunk step: exact lattice sums (CRW) or sum/compensation (Y).
  std::vector<std::int64_t> isum(kind == WalkKind::CRW ? blocks * T : 0);
  std::vector<double> fsum(kind == WalkKind::Y ? blocks * T : 0), fcomp(fsum.size());
  std::vector<double> partial(kind == WalkKind::Y ? blocks : 0);

  bool stopped = false;
  for (std::uint64_t t0 = 0; t0 < N && !stopped; t0 += T) {
    const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(T, N - t0));
    pool.run(blocks, [&](std::size_t b) {
      const std::uint64_t lo = b * kWalkBlock, hi = std::min<std::uint64_t>(M, lo + kWalkBlock);
      if (kind == WalkKind::CRW) {
        std::int64_t* acc = isum.data() + b * T;
        std::fill(acc, acc + len, 0);
        for (std::uint64_t j = lo; j < hi; ++j) {
          Walker& w = walkers[static_cast<std::size_t>(j)];
          for (std::size_t i = 0; i < len; ++i) {
            step_lattice(w.state, w.rng);
            acc[i] += w.state.lattice;
          }
        }
      } else {
        double* sum = fsum.data() + b * T;
        double* comp = fcomp.data() + b * T;
        std::fill(sum, sum + len, 0.0);
        std::fill(comp, comp + len, 0.0);
        for (std::uint64_t j = lo; j < hi; ++j) {
          Walker& w = walkers[static_cast<std::size_t>(j)];
          for (std::size_t i = 0; i < len; ++i) {
            step_lattice(w.state, w.rng);
            const double x = w.state.position();
            const double s = sum[i] + x;  // Neumaier
            comp[i] += std::abs(sum[i]) >= std::abs(x) ? (sum[i] - s) + x : (x - s) + sum[i];
            sum[i] = s;
          }
        }
      }
    });
    for (std::size_t i = 0; i < len; ++i) {
      double v;
      if (kind == WalkKind::CRW) {
        std::int64_t total = 0;
        for (std::size_t b = 0; b < blocks; ++b) total += isum[b * T + i];
        v = scale * static_cast<double>(total);
      } else {
        for (std::size_t b = 0; b < blocks; ++b) partial[b] = fsum[b * T + i] + fcomp[b * T + i];
        v = scale * pairwise_sum(partial.data(), blocks);
      }
      if (!sink(t0 + i + 1, v)) {
        stopped = true;
        break;
      }
    }
  }

  std::uint64_t draws = 0;
  for (auto d : persistence_draws) draws += d;
  for (const auto& w : walkers) draws += w.rng.draws();
  return draws;
}

}  // namespace

std::uint64_t stream_fbm(const EnsembleConfig& cfg, const StepSink& sink, ExecOptions exec) {
  const double scale = scale_factor(cfg.measure, cfg.N, cfg.M);
  const PersistenceSampler draw(cfg.measure);
  return run_ensemble(walk_kind_for(cfg.measure.regime()), cfg.N, cfg.M, cfg.master_seed, scale,
                      [&](std::uint64_t, RngStream& rng) { return draw(rng); }, sink, exec);
}

EnsembleTrajectory simulate_fbm(const EnsembleConfig& cfg, ExecOptions exec) {
  EnsembleTrajectory out{{}, cfg, scale_factor(cfg.measure, cfg.N, cfg.M), 0};
  out.values.assign(static_cast<std::size_t>(cfg.N) + 1, 0.0);
  out.draws = stream_fbm(
      cfg,
      [&](std::uint64_t i, double v) {
        out.values[static_cast<std::size_t>(i)] = v;
        return true;
      },
      exec);
  return out;
}

std::vector<double> simulate_quenched(WalkKind kind, double p, std::uint64_t N, std::uint64_t M,
                                      std::uint64_t master_seed, double scale, ExecOptions exec) {
  std::vector<double> values(static_cast<std::size_t>(N) + 1, 0.0);
  run_ensemble(
      kind, N, M, master_seed, scale, [p](std::uint64_t, RngStream&) { return p; },
      [&](std::uint64_t i, double v) {
        values[static_cast<std::size_t>(i)] = v;
        return true;
      },
      exec);
  return values;
}

}  // namespace fbm
