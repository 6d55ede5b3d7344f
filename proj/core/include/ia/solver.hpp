#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ia/channel.hpp"

namespace ia::solver {

/// Per-user single-beam transmit/receive vectors. Invariant maintained by
/// every producer in this module: unit norm and canonical phase (the first
/// entry of largest modulus is real and nonnegative).
struct BeamformerSet {
  std::vector<lin::Vector> v;  ///< transmit beams, length nt each
  std::vector<lin::Vector> u;  ///< receive beams, length nr each
};

struct SolverConfig {
  int max_iters = 5000;
  int restarts = 20;
  double tol_leakage = 1e-9;
  double tol_margin = 1e-4;
  std::uint64_t seed = 0;
};

/// The solver never claims infeasibility: failure to align within budget is
/// reported as Undetermined.
enum class Verdict { Feasible, Undetermined };

struct FeasibilityReport {
  Verdict verdict = Verdict::Undetermined;
  double best_leakage = 0.0;
  double direct_margin = 0.0;
  int iters_used = 0;
  int restart_index = -1;
  double wall_ms = 0.0;
};

/// Unit norm plus canonical phase, in place. Zero vectors pass through.
void canonicalize(lin::Vector& x);

/// Interference leakage, normalized to be scale invariant:
/// sum_{k != j} |u_k^H H_kj v_j|^2 / sum_{k != j} ||H_kj||_F^2. Zero for K=1.
double leakage(const channel::ChannelInstance& ch, const BeamformerSet& beams);

/// min_k |u_k^H H_kk v_k| / ||H_kk||_F: the worst normalized direct-link
/// gain. Zero-forcing alone is not alignment; this guards against it.
double direct_margin(const channel::ChannelInstance& ch, const BeamformerSet& beams);

/**
 * One alternating-minimization pass: every u_k is replaced by a minimal
 * eigenvector of its interference covariance Q_k = sum_{j != k} (H_kj v_j)
 * (H_kj v_j)^H, then every v_j symmetrically using the updated u's.
 *
 * Deterministic tie handling: if the current beam already attains the
 * minimal eigenvalue (within a small degeneracy tolerance) it is kept;
 * otherwise, among degenerate minimal eigenvectors the canonicalized
 * candidate that is lexicographically largest (entrywise, real part then
 * imaginary part) is chosen. Leakage never increases across a step.
 */
BeamformerSet alt_min_step(const channel::ChannelInstance& ch, const BeamformerSet& beams);

/**
 * Multi-start alternating minimization. Each restart draws an independent
 * Gaussian initialization from a seed derived from (config.seed, restart)
 * and iterates until the descent stalls (a fixed point), leakage hits a
 * floor far below any useful tolerance, or max_iters runs out; the
 * converged state is then judged against tol_leakage and tol_margin.
 * Judging mid-descent instead would mistake trajectories that sink into a
 * degenerate zero pattern for solutions while their margin is still decaying
 * through tol_margin. The first restart that passes wins; otherwise the
 * lowest-leakage run is reported as Undetermined. K=1 is solved directly
 * with a matched filter.
 */
std::pair<BeamformerSet, FeasibilityReport> solve(const channel::ChannelInstance& ch,
                                                  const SolverConfig& config);

/// True iff leakage < tol_leakage and direct_margin > tol_margin.
bool verify(const channel::ChannelInstance& ch, const BeamformerSet& beams,
            double tol_leakage = 1e-9, double tol_margin = 1e-4);

/**
 * Deterministic achievability construction: users are packed into the
 * family's diagonal slots (time extensions, per-slot antenna blocks, or 2x2
 * real-signaling blocks) and each slot's constant sub-channel is solved as
 * its own small interference network. Cross-slot terms vanish exactly by
 * block-diagonal structure. Throws TooManyUsers past the slot capacity and
 * SlotSolveFailed if a sub-solve comes back Undetermined.
 */
BeamformerSet orthogonal_scheme(const channel::ChannelInstance& ch, const SolverConfig& config);

/// Unit-norm canonical Gaussian beams (the solver's restart initializer).
BeamformerSet random_beams(const channel::ChannelInstance& ch, std::uint64_t seed);

}  // namespace ia::solver
