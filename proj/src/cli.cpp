#include "fbm/cli.hpp"

#include <CLI11.hpp>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fbm/measures.hpp"
#include "fbm/oracle.hpp"
#include "fbm/planner.hpp"
#include "fbm/special.hpp"
#include "fbm/statistics.hpp"
#include "fbm/superposition.hpp"
#include "fbm/version.hpp"

namespace fbm {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Flags shared by the ensemble subcommands.
struct EnsembleArgs {
  double hurst = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t walks = 0;
  std::string family = "mu-k";
  double k = 1.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  MeasureSpec measure() const { return make_measure(parse_family(family), hurst, k); }
};

void add_ensemble_flags(CLI::App* cmd, EnsembleArgs& a, bool walks_required) {
  cmd->add_option("--hurst", a.hurst, "Hurst parameter in [0.01, 0.99]")->required();
  cmd->add_option("--steps", a.steps, "time steps N")->required()->check(CLI::PositiveNumber);
  auto* w = cmd->add_option("--walks", a.walks, "walk count M")->check(CLI::PositiveNumber);
  if (walks_required) w->required();
  cmd->add_option("--family", a.family, "mu-base | mu-k | mu-prime-k | nu-k")
      ->check(CLI::IsMember({"mu-base", "mu-k", "mu-prime-k", "nu-k"}));
  cmd->add_option("--k", a.k, "shape parameter k");
  cmd->add_option("--seed", a.seed, "master seed");
  cmd->add_option("--threads", a.threads, "worker threads (default: FBM_THREADS or all cores)");
}

// Normalized increments c Σ δ / √M of a path: autocovariance c² r(n).
std::vector<double> normalized_increments(const std::vector<double>& path, double factor) {
  std::vector<double> d(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) d[i] = (path[i + 1] - path[i]) * factor;
  return d;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const EnsembleArgs& a, std::optional<double> target, std::uint64_t max_walks, const std::string& out_path,
                 const std::string& format, std::ostream& out) {
  MeasureSpec m = a.measure();
  std::uint64_t M = a.walks;
  if (target) {
    AdviseOptions opt;
    opt.family = m.family;
    opt.k = m.k;
    opt.max_walks = max_walks;
    M = advise(a.hurst, a.steps, *target, opt).M;
  }
  if (M == 0) throw UsageError("either --walks or --target-error is required");
  const EnsembleConfig cfg{m, a.steps, M, a.seed};

  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  std::uint64_t digest = fnv1a64("");
  auto emit = [&](const char* data, std::size_t len) {
    file.write(data, static_cast<std::streamsize>(len));
    digest = fnv1a64(std::string_view(data, len), digest);
  };
  const bool csv = format == "csv";
  const double N = static_cast<double>(a.steps);
  auto write_point = [&](std::uint64_t i, double v) {
    if (csv) {
      char buf[64];
      const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", static_cast<double>(i) / N, v);
      emit(buf, static_cast<std::size_t>(len));
    } else {
      auto bits = std::bit_cast<std::uint64_t>(v);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      char buf[8];
      std::memcpy(buf, &bits, 8);
      emit(buf, 8);
    }
    return true;
  };
  if (csv) emit("t,value\n", 8);
  write_point(0, 0.0);
  const std::uint64_t draws = stream_fbm(cfg, write_point, ExecOptions{a.threads});
  file.close();
  if (!file) throw std::runtime_error("write to '" + out_path + "' failed");

  std::ofstream manifest(out_path + ".manifest");
  const std::string body = "command=simulate\nversion=" + std::string(kVersion) + "\nhurst=" + num(a.hurst) +
                           "\nsteps=" + std::to_string(a.steps) + "\nwalks=" + std::to_string(M) +
                           "\nfamily=" + std::string(to_string(m.family)) + "\nk=" + num(m.k) +
                           "\nseed=" + std::to_string(a.seed) + "\nformat=" + format +
                           "\nscale=" + num(scale_factor(m, a.steps, M)) + "\ndraws=" + std::to_string(draws) +
                           "\noutput=" + out_path + "\ndigest_fnv1a64=" + hex64(digest) + "\n";
  manifest << body;
  if (!manifest) throw std::runtime_error("cannot write manifest for '" + out_path + "'");
  out << body;
  return kExitOk;
}

int cmd_advise(double H, std::uint64_t N, double target, const std::string& family, std::optional<double> k,
               std::uint64_t max_walks, double slack, bool esseen, std::ostream& out) {
  AdviseOptions opt;
  opt.family = parse_family(family);
  opt.k = k;
  opt.max_walks = max_walks;
  opt.slack = slack;
  opt.constant = esseen ? kEsseenConjecturedConstant : kBerryEsseenConstant;
  const AccuracyPlan plan = advise(H, N, target, opt);
  const MeasureSpec m = make_measure(plan.family, H, plan.k);
  out << "M=" << plan.M << "\n"
      << "k=" << num(plan.k) << "\n"
      << "family=" << to_string(plan.family) << "\n"
      << "predicted_error=" << num(plan.predicted_error) << "\n"
      << "cost_units=" << num(plan.cost_units) << "\n"
      << "rate_condition_ok=" << (plan.rate_condition_ok ? "true" : "false") << "\n"
      << "rate_threshold=" << num(rate_threshold(m, N)) << "\n"
      << "berry_esseen_constant=" << num(opt.constant) << "\n"
      << "displayed_error=" << num(displayed_error(m, N, plan.M)) << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::uint64_t replications = 0;
  std::string report;
  std::uint64_t max_lag = 8;
  std::uint64_t min_lag = 16;
  std::uint64_t rise_runs = 0;
};

int cmd_validate(const EnsembleArgs& a, const ValidateArgs& v, std::ostream& out) {
  const MeasureSpec m = a.measure();
  if (v.replications < 30) throw UsageError("--replications must be at least 30");
  if (a.steps % 8 != 0) throw UsageError("--steps must be divisible by 8 (covariance grid)");
  if (a.steps / std::max<std::uint64_t>(v.min_lag, 1) < 8) throw UsageError("--steps too small for 4 Hurst scales");
  if (4 * v.max_lag >= a.steps) throw UsageError("--max-lag must be below steps/4");
  const double c = scaling_constant(m).c;
  const double scale = scale_factor(m, a.steps, a.walks);
  const double norm = c / (scale * std::sqrt(static_cast<double>(a.walks)));

  SampleRows paths, incs;
  std::vector<double> endpoints;
  for (std::uint64_t r = 0; r < v.replications; ++r) {
    auto traj = simulate_fbm({m, a.steps, a.walks, stream_key(a.seed, r)}, ExecOptions{a.threads});
    incs.push_back(normalized_increments(traj.values, norm));
    endpoints.push_back(traj.values.back());
    paths.push_back(std::move(traj.values));
  }

  ValidationReport rep;
  rep.parameters = {{"command", "validate"},
                    {"version", kVersion},
                    {"hurst", num(a.hurst)},
                    {"steps", std::to_string(a.steps)},
                    {"walks", std::to_string(a.walks)},
                    {"family", std::string(to_string(m.family))},
                    {"k", num(m.k)},
                    {"seed", std::to_string(a.seed)},
                    {"replications", std::to_string(v.replications)}};
  const auto r = autocovariance_sequence(m, v.max_lag);
  double max_lag_z = 0.0;
  for (const auto& e : empirical_autocovariance(incs, v.max_lag)) {
    AutocovRow row{e.lag, e.estimate, e.se, c * c * r[e.lag], fgn_autocovariance(e.lag, a.hurst)};
    max_lag_z = std::max(max_lag_z, std::abs(row.estimate - row.theory) / row.se);
    rep.autocov.push_back(row);
  }
  rep.covariance = covariance_grid(paths, a.hurst, 8);
  rep.hurst = estimate_hurst(variance_time_scales(paths, v.min_lag));
  rep.verdicts.push_back({"autocov_max_z", max_lag_z, 4.0, true});
  rep.verdicts.push_back({"covariance_max_z", rep.covariance.max_z, 4.0, true});
  rep.verdicts.push_back({"hurst_abs_error", std::abs(rep.hurst.H_hat - a.hurst), 0.05, true});
  if (endpoints.size() >= 500) {
    rep.has_ks = true;
    rep.ks = marginal_normality(endpoints, 1.0);
    rep.verdicts.push_back({"ks_p_value", rep.ks.p_value, 0.01, false});
  }
  if (v.rise_runs > 0) {
    const auto lengths = sample_first_run_lengths(m, v.rise_runs, 1u << 20, a.seed);
    rep.rise_tail = rise_tail_report(lengths, m, {10, 100, 1000});
  }

  if (!v.report.empty()) {
    std::ofstream f(v.report);
    f << rep.to_kv();
    if (!f) throw std::runtime_error("cannot write report '" + v.report + "'");
  }
  for (const auto& verdict : rep.verdicts) {
    out << verdict.name << "=" << num(verdict.value) << (verdict.at_most ? " <= " : " >= ") << num(verdict.threshold)
        << (verdict.pass() ? " pass" : " FAIL") << "\n";
  }
  out << "hurst_estimate=" << num(rep.hurst.H_hat) << " [" << num(rep.hurst.ci_low) << ", " << num(rep.hurst.ci_high)
      << "]\n";
  out << "overall=" << (rep.all_pass() ? "pass" : "fail") << "\n";
  return rep.all_pass() ? kExitOk : kExitValidationFailed;
}

int cmd_compare(const EnsembleArgs& a, std::uint64_t replications, std::uint64_t max_lag, std::uint64_t min_lag,
                std::ostream& out) {
  const MeasureSpec m = a.measure();
  if (a.steps > kOracleMaxSize) throw UsageError("--steps must not exceed " + std::to_string(kOracleMaxSize));
  if (replications < 30) throw UsageError("--replications must be at least 30");
  if (4 * max_lag >= a.steps) throw UsageError("--max-lag must be below steps/4");
  if (a.steps / std::max<std::uint64_t>(min_lag, 1) < 8) throw UsageError("--steps too small for 4 Hurst scales");
  using Clock = std::chrono::steady_clock;
  const double c = scaling_constant(m).c;
  const double scale = scale_factor(m, a.steps, a.walks);

  // Construction side.
  SampleRows walk_paths, walk_incs;
  std::uint64_t walk_draws = 0;
  auto t0 = Clock::now();
  for (std::uint64_t r = 0; r < replications; ++r) {
    auto traj = simulate_fbm({m, a.steps, a.walks, stream_key(a.seed, r)}, ExecOptions{a.threads});
    walk_draws += traj.draws;
    walk_incs.push_back(normalized_increments(traj.values, c / (scale * std::sqrt(static_cast<double>(a.walks)))));
    walk_paths.push_back(std::move(traj.values));
  }
  const double walk_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  // Exact Gaussian side.
  SampleRows exact_paths, exact_incs;
  std::uint64_t exact_draws = 0;
  const double fgn_norm = std::pow(static_cast<double>(a.steps), a.hurst);
  t0 = Clock::now();
  for (std::uint64_t r = 0; r < replications; ++r) {
    RngStream rng(stream_key(stream_key(a.seed, r), 0xC0FFEE));
    std::vector<double> path{0.0};
    const auto x = exact_fbm_sample(a.hurst, static_cast<std::size_t>(a.steps), rng);
    path.insert(path.end(), x.begin(), x.end());
    exact_draws += rng.draws();
    exact_incs.push_back(normalized_increments(path, fgn_norm));
    exact_paths.push_back(std::move(path));
  }
  const double exact_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  const auto walk_ac = empirical_autocovariance(walk_incs, max_lag);
  const auto exact_ac = empirical_autocovariance(exact_incs, max_lag);
  const auto r = autocovariance_sequence(m, max_lag);
  char line[256];
  std::snprintf(line, sizeof line, "%4s  %12s %10s %12s  %12s %10s %12s\n", "lag", "walks", "se", "walk_theory",
                "exact", "se", "fgn");
  out << line;
  for (std::size_t i = 0; i <= max_lag; ++i) {
    std::snprintf(line, sizeof line, "%4zu  %12.6f %10.6f %12.6f  %12.6f %10.6f %12.6f\n", i, walk_ac[i].estimate,
                  walk_ac[i].se, c * c * r[i], exact_ac[i].estimate, exact_ac[i].se, fgn_autocovariance(i, a.hurst));
    out << line;
  }
  const auto hw = estimate_hurst(variance_time_scales(walk_paths, min_lag));
  const auto he = estimate_hurst(variance_time_scales(exact_paths, min_lag));
  out << "walks.hurst=" << num(hw.H_hat) << "\n"
      << "walks.hurst_ci=" << num(hw.ci_low) << "," << num(hw.ci_high) << "\n"
      << "walks.seconds=" << num(walk_seconds) << "\n"
      << "walks.draws=" << walk_draws << "\n"
      << "walks.cost_estimate=" << num(cost_estimate(m, a.steps, a.walks) * static_cast<double>(replications)) << "\n"
      << "exact.hurst=" << num(he.H_hat) << "\n"
      << "exact.hurst_ci=" << num(he.ci_low) << "," << num(he.ci_high) << "\n"
      << "exact.seconds=" << num(exact_seconds) << "\n"
      << "exact.draws=" << exact_draws << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional Brownian motion from superposed correlated random walks", "fbmsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  EnsembleArgs sim;
  std::optional<double> sim_target;
  std::uint64_t sim_max_walks = 10'000'000;
  std::string sim_out, sim_format = "csv";
  auto* simulate = app.add_subcommand("simulate", "write one rescaled trajectory");
  add_ensemble_flags(simulate, sim, false);
  simulate->add_option("--target-error", sim_target, "pick M with the accuracy planner");
  simulate->add_option("--max-walks", sim_max_walks, "planner cap on M");
  simulate->add_option("--out", sim_out, "output file")->required();
  simulate->add_option("--format", sim_format, "csv | f64le")->check(CLI::IsMember({"csv", "f64le"}));

  double adv_hurst = 0.0, adv_target = 0.0, adv_slack = 1.0;
  std::uint64_t adv_steps = 0, adv_max_walks = 10'000'000;
  std::string adv_family = "mu-k";
  std::optional<double> adv_k;
  bool adv_esseen = false;
  auto* adv = app.add_subcommand("advise", "recommend a walk count for a target error");
  adv->add_option("--hurst", adv_hurst)->required();
  adv->add_option("--steps", adv_steps)->required();
  adv->add_option("--target-error", adv_target)->required();
  adv->add_option("--family", adv_family)->check(CLI::IsMember({"mu-base", "mu-k", "mu-prime-k", "nu-k"}));
  adv->add_option("--k", adv_k, "fix k instead of searching 1, 2, 4, ...");
  adv->add_option("--max-walks", adv_max_walks);
  adv->add_option("--slack", adv_slack, "multiplier on the rate-condition threshold");
  adv->add_flag("--esseen-constant", adv_esseen, "use the conjectured constant 0.41 instead of 0.65");

  EnsembleArgs val;
  ValidateArgs vargs;
  auto* validate = app.add_subcommand("validate", "replicate and test against the theory");
  add_ensemble_flags(validate, val, true);
  validate->add_option("--replications", vargs.replications)->required();
  validate->add_option("--report", vargs.report, "key=value report file");
  validate->add_option("--max-lag", vargs.max_lag);
  validate->add_option("--min-lag", vargs.min_lag, "smallest Hurst aggregation scale");
  validate->add_option("--rise-runs", vargs.rise_runs, "also tabulate rise lengths of this many walks");

  EnsembleArgs cmp;
  std::uint64_t cmp_reps = 200, cmp_max_lag = 8, cmp_min_lag = 16;
  auto* compare = app.add_subcommand("compare", "walk construction against exact Gaussian sampling");
  add_ensemble_flags(compare, cmp, true);
  compare->add_option("--replications", cmp_reps);
  compare->add_option("--max-lag", cmp_max_lag);
  compare->add_option("--min-lag", cmp_min_lag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "fbmsim: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, sim_target, sim_max_walks, sim_out, sim_format, out);
    if (adv->parsed()) {
      return cmd_advise(adv_hurst, adv_steps, adv_target, adv_family, adv_k, adv_max_walks, adv_slack, adv_esseen, out);
    }
    if (validate->parsed()) return cmd_validate(val, vargs, out);
    if (compare->parsed()) return cmd_compare(cmp, cmp_reps, cmp_max_lag, cmp_min_lag, out);
  } catch (const InfeasiblePlan& e) {
    err << "fbmsim: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const UsageError& e) {
    err << "fbmsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "fbmsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "fbmsim: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace fbm
