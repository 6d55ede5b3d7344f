#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ia/channel.hpp"

namespace ia::supports {

/**
 * One zero-forcing equation u_k^H H_kj v_j = 0 reduced to its structural
 * skeleton: after scaling the anchored entries of u_k and v_j to 1, each
 * surviving channel term contributes either a constant or a monomial over
 * the free variables. Only presence matters here, so monomials form a set
 * of variable-index subsets. Verdicts drawn from these skeletons assume the
 * surviving coefficients are generic (true for the generic families;
 * AcsConstant's coefficients are structured, so for it the skeleton is a
 * structural statement only).
 */
struct ZfEquation {
  int rx = 0;  ///< receiver k
  int tx = 0;  ///< transmitter j (k != j)
  bool has_constant = false;
  std::vector<std::vector<int>> monomials;  ///< sorted variable-index sets
};

struct ZfSystem {
  int n = 0;  ///< number of free variables
  int K = 0;
  int nr = 0;
  int nt = 0;
  std::vector<int> u_anchor;  ///< per-user anchored receive entry
  std::vector<int> v_anchor;  ///< per-user anchored transmit entry
  std::vector<ZfEquation> equations;

  int m() const { return static_cast<int>(equations.size()); }
  /// Free-variable index of receive entry p of user k (p != u_anchor[k]).
  int u_var(int k, int p) const;
  /// Free-variable index of transmit entry q of user j (q != v_anchor[j]).
  int v_var(int j, int q) const;
};

/// Entry-level support pattern (meaningful for SISO diagonal families,
/// where nr == nt == T). Anchors default to the smallest in-support index.
struct SupportPattern {
  int K = 0;
  int nr = 0;
  int nt = 0;
  std::vector<std::vector<int>> R;  ///< receive supports, sorted
  std::vector<std::vector<int>> S;  ///< transmit supports, sorted
  std::vector<int> r_anchor;
  std::vector<int> s_anchor;

  static SupportPattern full(int K, int nr, int nt);
  static SupportPattern from_sets(int K, int nr, int nt, std::vector<std::vector<int>> R,
                                  std::vector<std::vector<int>> S);
};

/// Slot-level (block) support pattern over T extensions of an Mr x Mt link.
struct BlockSupportPattern {
  int K = 0;
  int T = 0;
  int Mr = 1;
  int Mt = 1;
  std::vector<std::vector<int>> Rb;  ///< receive slot supports, sorted
  std::vector<std::vector<int>> Sb;  ///< transmit slot supports, sorted

  static BlockSupportPattern from_sets(int K, int T, int Mr, int Mt,
                                       std::vector<std::vector<int>> Rb,
                                       std::vector<std::vector<int>> Sb);
  /// Entry-level view; requires Mr == Mt == 1.
  SupportPattern to_entry_pattern() const;
};

struct CountReport {
  int J_size = 0;
  bool J_is_upper_bound = false;  ///< true for block patterns with antennas
  int PJ_size = 0;                ///< surviving equations = |omega_c|
  std::vector<std::pair<int, int>> omega;    ///< cross pairs with disjoint supports
  std::vector<std::pair<int, int>> omega_c;  ///< cross pairs with overlapping supports
  bool ruled_out = false;                    ///< PJ_size >= J_size + 1
};

/// Structural zero-forcing system with full supports and anchors at index 0.
ZfSystem build_zf_system(const channel::ChannelFamily& family, int K);
/// Same, but anchored and restricted-ready for a specific pattern's anchors.
ZfSystem build_zf_system(const channel::ChannelFamily& family, int K,
                         const SupportPattern& pattern);

/// Partial system P_J: monomials touching variables outside J vanish;
/// constants survive. Equations may become identically zero.
ZfSystem restrict_system(const ZfSystem& sys, const std::vector<int>& J);

/// Number of equations that are not identically zero.
int count_nonzero(const ZfSystem& sys);

/// True iff every subset J of the variables satisfies |P_J| >= |J| + 1
/// (then a generic-coefficient system has no solution at all, the
/// everywhere-overdetermined certificate). Exhaustive over 2^n subsets;
/// throws TooLarge for n > 22.
bool improper_everywhere(const ZfSystem& sys);

/// Free variables selected by a pattern: in-support, non-anchored entries
/// of a system built with the same anchors.
std::vector<int> pattern_variables(const ZfSystem& sys, const SupportPattern& pattern);

CountReport omega_partition(const SupportPattern& pattern);
CountReport omega_partition(const BlockSupportPattern& pattern);

/// Exact free-variable count sum_k (|R_k| + |S_k|) - 2K.
int free_variable_count(const SupportPattern& pattern);
/// Upper bound sum_k (|Rb_k| Mr + |Sb_k| Mt) - 2K.
int free_variable_count(const BlockSupportPattern& pattern);

/// omega partition + variable count + the overdetermination verdict.
/// For block patterns the variable count is an upper bound, which keeps
/// ruled_out sound.
CountReport counting_verdict(const SupportPattern& pattern);
CountReport counting_verdict(const BlockSupportPattern& pattern);

/**
 * Structural audit every genuine alignment support pattern must pass: for
 * each receiver k, the number of transmitters its beams are disjoint from
 * obeys |{j : R_k cap S_j = empty}| <= f_upper(T - a_k), and symmetrically
 * per transmitter with b_j. f_upper must be monotone with f_upper(0) = 0.
 */
bool induction_audit(const SupportPattern& pattern, const std::function<int(int)>& f_upper);
bool induction_audit(const BlockSupportPattern& pattern, const std::function<int(int)>& f_upper);

/// Default audit bound: x -> max(0, (Mr + Mt) x - 1).
std::function<int(int)> default_f_upper(int Mr, int Mt);

/**
 * Visits every block support pattern ((2^T - 1)^(2K) of them) in
 * lexicographic order (R_1, ..., R_K, S_1, ..., S_K, each subset by
 * ascending bitmask), calling fn with the pattern and its counting verdict.
 * Throws BudgetExceeded if the pattern count exceeds the budget
 * (default guidance: 1e7). Returns the number visited.
 */
std::uint64_t enumerate_block_patterns(
    const channel::ChannelFamily& family, int K, std::uint64_t budget,
    const std::function<void(const BlockSupportPattern&, const CountReport&)>& fn);

}  // namespace ia::supports
