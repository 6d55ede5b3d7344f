#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ia/linalg.hpp"

namespace ia::channel {

/// Built-in channel families. Each one fixes a basis of "building block"
/// matrices; a channel realization is a random linear combination of them.
enum class FamilyKind {
  SisoGenericExt,   ///< T generic time/frequency extensions of a SISO link (diagonal unit basis)
  SisoLTap,         ///< L-tap frequency-selective SISO link over N = T tones
  SisoBlockFading,  ///< piecewise-constant SISO fading, one block per coherence interval
  MimoConstant,     ///< constant Mr x Mt MIMO link (elementary-matrix basis)
  MimoConstantExt,  ///< constant MIMO link repeated over T extensions
  MimoGenericExt,   ///< generic per-slot MIMO extensions
  AcsConstant,      ///< real-expanded asymmetric complex signaling link (2T x 2T, two blocks)
  Custom,           ///< caller-supplied blocks
};

struct ChannelFamily {
  FamilyKind kind = FamilyKind::SisoGenericExt;
  int Mt = 1;  ///< transmit antennas (1 for SISO kinds)
  int Mr = 1;  ///< receive antennas (1 for SISO kinds)
  int T = 1;   ///< number of channel extensions (tones/slots)
  std::vector<int> delays;              ///< SisoLTap: strictly increasing, in [0, T-1]
  std::vector<int> block_lengths;       ///< SisoBlockFading: per-block extension counts
  std::vector<lin::Matrix> custom_blocks;  ///< Custom only

  static ChannelFamily siso_generic_ext(int T);
  static ChannelFamily siso_l_tap(int N, std::vector<int> delays);
  static ChannelFamily siso_block_fading(std::vector<int> lengths);
  static ChannelFamily mimo_constant(int Mt, int Mr);
  static ChannelFamily mimo_constant_ext(int Mt, int Mr, int T);
  static ChannelFamily mimo_generic_ext(int Mt, int Mr, int T);
  static ChannelFamily acs_constant(int T);
  static ChannelFamily custom(std::vector<lin::Matrix> blocks);

  int nt() const;  ///< ambient transmit dimension (AcsConstant: 2T)
  int nr() const;  ///< ambient receive dimension
  int L() const;   ///< number of building blocks (channel diversity order by construction)
  /// AcsConstant models real signaling: its combination coefficients are real.
  bool real_taus() const { return kind == FamilyKind::AcsConstant; }
  bool is_siso_diagonal() const;

  /// Throws InvalidFamilyParams on out-of-range parameters.
  void validate() const;
};

std::string family_name(FamilyKind kind);

struct BuildingBlocks {
  ChannelFamily family;
  std::vector<lin::Matrix> blocks;

  int nr() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  int nt() const { return blocks.empty() ? 0 : blocks.front().cols(); }
  int count() const { return static_cast<int>(blocks.size()); }
};

/// Materializes the family's basis matrices.
/// Custom blocks are additionally checked for linear independence
/// (DegenerateBlocks otherwise); whether a full-rank combination exists is a
/// separate question answered by has_full_rank_combination.
BuildingBlocks build_blocks(const ChannelFamily& family);

/**
 * One sampled K-user interference network.
 *
 * tau[k][j][l] are the i.i.d. combination coefficients of link (k, j)
 * (standard circularly-symmetric complex Gaussians; real Gaussians for
 * AcsConstant) and H[k][j] = sum_l tau[k][j][l] * A_l.
 */
struct ChannelInstance {
  BuildingBlocks blocks;
  int K = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::vector<lin::cplx>>> tau;
  std::vector<std::vector<lin::Matrix>> H;

  int nr() const { return blocks.nr(); }
  int nt() const { return blocks.nt(); }
  int L() const { return blocks.count(); }
};

/// Deterministic per (blocks, K, seed); tau draw order is k-major, then j,
/// then l, so extending K re-derives earlier links only when seeds match.
ChannelInstance sample_instance(const BuildingBlocks& blocks, int K, std::uint64_t seed);

/// sum_l tau_l A_l for one link.
lin::Matrix assemble(const BuildingBlocks& blocks, const std::vector<lin::cplx>& tau);

/// Rank of the L x (nr*nt) matrix of vectorized blocks: the number of
/// linearly independent blocks.
int diversity_order(const BuildingBlocks& blocks, double rel_tol = 1e-8);

/// Monte Carlo probe of whether some combination of the blocks reaches rank
/// min(nr, nt). A single full-rank draw settles it (the full-rank set is
/// open); all-degenerate draws make a false verdict overwhelmingly likely.
bool has_full_rank_combination(const BuildingBlocks& blocks, int trials, std::uint64_t seed,
                               double rel_tol = 1e-8);

}  // namespace ia::channel
