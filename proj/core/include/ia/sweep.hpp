#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ia/bounds.hpp"
#include "ia/channel.hpp"
#include "ia/solver.hpp"

namespace ia::sweep {

struct SweepConfig {
  channel::ChannelFamily family;
  int K_min = 1;
  int K_max = 1;
  int trials_per_K = 1;
  solver::SolverConfig solver;  ///< seed field is ignored; per-trial seeds are derived
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir;
  bool resume = false;
  int jobs = 1;
};

/**
 * Flat key=value config, one pair per line, '#' starts a comment.
 * Keys: family, Mt, Mr, T, L, delays, block_lengths, K_min, K_max, trials,
 * max_iters, restarts, tol_leakage, tol_margin, seed, out_dir. Required:
 * family (plus its parameters), K_min, K_max, trials, out_dir. For
 * siso_l_tap, L alone means delays 0..L-1; an explicit delays list wins.
 * resume and jobs are caller flags, not file keys.
 */
SweepConfig parse_config_file(const std::filesystem::path& path);

struct TrialRecord {
  std::string family;
  int Mt = 1;
  int Mr = 1;
  int T = 1;
  int L = 1;
  int K = 0;
  int trial_index = 0;
  std::uint64_t seed = 0;  ///< trial seed; instance and solver seeds split from it
  solver::Verdict verdict = solver::Verdict::Undetermined;
  double leakage = 0.0;
  double margin = 0.0;
  int iters = 0;
  int restarts_used = 0;
  double wall_ms = 0.0;
};

struct KSummary {
  int K = 0;
  int trials = 0;
  int feasible = 0;
  double feasible_fraction = 0.0;
};

struct SweepSummary {
  channel::ChannelFamily family;
  int K_min = 1;
  int K_max = 1;
  int trials_per_K = 0;
  std::vector<KSummary> per_K;
  /// Largest K whose feasible fraction reaches 0.5; zero if none does.
  int empirical_K_star = 0;
  bounds::BoundReport bound_overlay;
  /// empirical_K_star <= bound_overlay.upper_K. A false value is reported
  /// as-is, never clamped away.
  bool k_star_within_upper = true;
};

/**
 * Runs trials_per_K independent (sample, solve) trials for every K in
 * [K_min, K_max] and writes trials.jsonl, summary.json, summary.csv and
 * summary.svg under out_dir.
 *
 * Seeding: trial_seed = split_seed(master_seed, K, trial_index); the
 * instance uses split_seed(trial_seed, 0) and the solver
 * split_seed(trial_seed, 1). No RNG state is shared between trials, so
 * records are identical no matter how many workers run them.
 *
 * trials.jsonl is append-only, one record per line, written in (K, trial)
 * order. With resume=true an existing file is scanned, a torn final line is
 * truncated away, and finished (K, trial) pairs are skipped; the file must
 * match the config (family, ranges, derived seeds) or ConfigError is
 * thrown. Without resume any previous outputs are overwritten.
 */
SweepSummary run_sweep(const SweepConfig& cfg);

/// Bar chart of feasible fraction vs K with vertical bound markers.
/// Self-contained deterministic SVG text.
std::string render_summary_svg(const SweepSummary& summary);

/// Writes render_summary_svg output; ConfigError when the summary is empty.
void plot_summary(const SweepSummary& summary, const std::filesystem::path& path);

}  // namespace ia::sweep
