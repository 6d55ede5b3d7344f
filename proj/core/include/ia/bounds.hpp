#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ia/channel.hpp"

namespace ia::bounds {

/// Largest single-beam user count compatible with fully generic T-fold
/// extensions of an Mt x Mr link: (Mr + Mt) T - 1.
int max_users_generic_ext(int Mt, int Mr, int T);

/// User count reached constructively on generic extensions by per-slot
/// orthogonalization: (Mr + Mt - 1) T.
int achievable_users_generic_ext(int Mt, int Mr, int T);

/// Universal diversity-limited cap, N = min(nt, nr) and L the diversity
/// order: floor(N L + N^2 / 4).
long long max_users_diversity(int N, int L);

/// Single-beam SISO DoF cap for K users over T extensions with diversity L:
/// min(sqrt(5K/4), L + T/4).
double siso_dof_upper(int K, int T, int L);

/// Single-beam MIMO DoF cap min(Mt, Mr) side swapped in automatically:
/// Mt * sqrt(5/4 * Mr * K) with Mt <= Mr.
double mimo_dof_upper(int Mt, int Mr, int K);

/// Orthogonalization floor N * L reached by some constant-extension models.
long long orthogonal_lower_bound(int N, int L);

/// Constant MIMO cap Mt + Mr - 1 (tight).
int max_users_constant_mimo(int Mt, int Mr);

struct BoundReport {
  int N = 0;
  int L = 0;
  int T = 1;
  long long upper_K = 0;
  long long achievable_K = 0;
  double dof_upper = 0.0;
  double dof_lower = 0.0;
  std::vector<std::string> formula_tags;
  /// Generic-extension upper can be tightened by one more user when T >= 2;
  /// reported as a flag, never folded into upper_K.
  bool ext_upper_tightens_at_t2 = false;
  std::optional<int> K;            ///< echoed query, if one was given
  bool K_within_upper = true;      ///< K <= upper_K (meaningful when K set)
};

/// Combines every bound that applies to the family; upper_K is the minimum
/// of the applicable caps and achievable_K the best constructive floor.
BoundReport bound_report(const channel::ChannelFamily& family, std::optional<int> K = {});

}  // namespace ia::bounds
