#pragma once

#include <vector>

#include "ia/channel.hpp"

namespace ia::lifted {

/**
 * Transmit-side data of the lifted alignment condition: the per-link
 * combination coefficients tau[k][j] (length L) and the K transmit beams
 * (length N). The lifted vector of link (k, j) stacks tau_kj^l * v_j over
 * l, giving length L*N.
 */
struct LiftedInstance {
  int K = 0;
  int N = 0;
  int L = 0;
  std::vector<std::vector<std::vector<lin::cplx>>> tau;
  std::vector<lin::Vector> v;
};

/// Packages an instance's tau with a transmit beam set (N = nt).
LiftedInstance make_lifted(const channel::ChannelInstance& ch,
                           const std::vector<lin::Vector>& v);

/// (tau^1 v; tau^2 v; ...; tau^L v), length L * |v|.
lin::Vector lift(const lin::Vector& v, const std::vector<lin::cplx>& tau_row);

/// Per-receiver lifted condition: the lifted direct vector of user k is
/// linearly independent of the span of its K-1 lifted interference vectors.
/// Rank decisions use singular values above tol * sigma_max.
std::vector<char> check_lifted_per_user(const LiftedInstance& inst, double tol = 1e-8);
bool check_lifted(const LiftedInstance& inst, double tol = 1e-8);

/// Original (unlifted) transmit-side condition: H_kk v_k is independent of
/// span{H_kj v_j : j != k}. Requires nt <= nr, the regime where the
/// receive side has been eliminated; throws DimensionMismatch otherwise.
std::vector<char> check_original_per_user(const channel::ChannelInstance& ch,
                                          const std::vector<lin::Vector>& v, double tol = 1e-8);
bool check_original(const channel::ChannelInstance& ch, const std::vector<lin::Vector>& v,
                    double tol = 1e-8);

/// Joint evaluation of both conditions. The original condition implies the
/// lifted one, so violation() flags a logic/numerics bug, never a valid state.
struct ImplicationResult {
  bool original = false;
  bool lifted = false;
  bool both_hold() const { return original && lifted; }
  bool lifted_only() const { return lifted && !original; }
  bool violation() const { return original && !lifted; }
};
ImplicationResult implication_test(const channel::ChannelInstance& ch,
                                   const std::vector<lin::Vector>& v, double tol = 1e-8);

struct UserDimensionAudit {
  std::vector<int> omega_k;  ///< transmitters orthogonal to every receive block of user k
  int p_k = 0;               ///< dim span{v_j : j in omega_k}
  int dim_u_k = 0;           ///< dim span{u_k^1, ..., u_k^L}
  bool ineq_ok = false;      ///< p_k + dim_u_k <= N
  bool claim_applicable = false;  ///< p_k == N - 1
  bool claim_ok = true;           ///< K <= |omega_k| + L when applicable
};

struct DimensionAudit {
  std::vector<UserDimensionAudit> users;
  bool all_ok = true;
};

/**
 * Audits a lifted zero-forcing solution. u_blocks[k] holds the L receive
 * blocks (length N each) of user k; they must satisfy the lifted
 * zero-forcing equations sum_l tau_kj^l (u_k^l)^H v_j = 0 for all j != k
 * within tol (relative), else NotAZeroForcingSolution is thrown.
 */
DimensionAudit dimension_audit(const LiftedInstance& inst,
                               const std::vector<std::vector<lin::Vector>>& u_blocks,
                               double tol = 1e-8);

/// Closed-form consistency check of a support profile against the free
/// parameters of the lifted system: |omega_c| <= K((L+1)N - 2) - L * sum p_k.
bool variable_count_audit(int K, int N, int L, const std::vector<int>& p, int omega_c_size);

/// Builds canonical lifted zero-forcing receivers: u_k is the component of
/// the lifted direct vector orthogonal to the lifted interference span,
/// normalized and split into L blocks. Nonzero whenever check_lifted holds
/// for user k.
std::vector<std::vector<lin::Vector>> lifted_zf_receivers(const LiftedInstance& inst);

}  // namespace ia::lifted
