#include "ia/lifted.hpp"

#include <algorithm>
#include <cmath>

#include "ia/errors.hpp"

namespace ia::lifted {

using lin::cplx;
using lin::Matrix;
using lin::Vector;

LiftedInstance make_lifted(const channel::ChannelInstance& ch, const std::vector<Vector>& v) {
  if (static_cast<int>(v.size()) != ch.K)
    throw DimensionMismatch("make_lifted: need K transmit beams");
  for (const Vector& vk : v)
    if (static_cast<int>(vk.size()) != ch.nt())
      throw DimensionMismatch("make_lifted: beam length != nt");
  LiftedInstance inst;
  inst.K = ch.K;
  inst.N = ch.nt();
  inst.L = ch.L();
  inst.tau = ch.tau;
  inst.v = v;
  return inst;
}

Vector lift(const Vector& v, const std::vector<cplx>& tau_row) {
  Vector out(tau_row.size() * v.size());
  size_t at = 0;
  for (cplx t : tau_row)
    for (cplx z : v) out[at++] = t * z;
  return out;
}

namespace {

/// rank([cols | extra]) == rank(cols) + 1, i.e. extra is independent of the span.
bool independent_of_span(const std::vector<Vector>& cols, const Vector& extra, double tol) {
  size_t rows = extra.size();
  Matrix base(static_cast<int>(rows), static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t i = 0; i < rows; ++i) base(static_cast<int>(i), static_cast<int>(j)) = cols[j][i];
  Matrix aug(static_cast<int>(rows), static_cast<int>(cols.size()) + 1);
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t i = 0; i < rows; ++i) aug(static_cast<int>(i), static_cast<int>(j)) = cols[j][i];
  for (size_t i = 0; i < rows; ++i)
    aug(static_cast<int>(i), static_cast<int>(cols.size())) = extra[i];
  return lin::numerical_rank(aug, tol) == lin::numerical_rank(base, tol) + 1;
}

void check_lifted_sizes(const LiftedInstance& inst) {
  if (static_cast<int>(inst.v.size()) != inst.K)
    throw DimensionMismatch("lifted: need K transmit beams");
  for (const Vector& vk : inst.v)
    if (static_cast<int>(vk.size()) != inst.N)
      throw DimensionMismatch("lifted: beam length != N");
  if (static_cast<int>(inst.tau.size()) != inst.K)
    throw DimensionMismatch("lifted: tau must be K x K x L");
  for (const auto& row : inst.tau) {
    if (static_cast<int>(row.size()) != inst.K)
      throw DimensionMismatch("lifted: tau must be K x K x L");
    for (const auto& t : row)
      if (static_cast<int>(t.size()) != inst.L)
        throw DimensionMismatch("lifted: tau must be K x K x L");
  }
}

}  // namespace

std::vector<char> check_lifted_per_user(const LiftedInstance& inst, double tol) {
  check_lifted_sizes(inst);
  std::vector<char> ok(inst.K, 0);
  for (int k = 0; k < inst.K; ++k) {
    std::vector<Vector> interference;
    for (int j = 0; j < inst.K; ++j)
      if (j != k) interference.push_back(lift(inst.v[j], inst.tau[k][j]));
    Vector direct = lift(inst.v[k], inst.tau[k][k]);
    ok[k] = independent_of_span(interference, direct, tol) ? 1 : 0;
  }
  return ok;
}

bool check_lifted(const LiftedInstance& inst, double tol) {
  std::vector<char> ok = check_lifted_per_user(inst, tol);
  return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

std::vector<char> check_original_per_user(const channel::ChannelInstance& ch,
                                          const std::vector<Vector>& v, double tol) {
  if (ch.nt() > ch.nr())
    throw DimensionMismatch(
        "check_original: requires nt <= nr (swap transmit/receive roles first)");
  if (static_cast<int>(v.size()) != ch.K)
    throw DimensionMismatch("check_original: need K transmit beams");
  std::vector<char> ok(ch.K, 0);
  for (int k = 0; k < ch.K; ++k) {
    std::vector<Vector> interference;
    for (int j = 0; j < ch.K; ++j)
      if (j != k) interference.push_back(lin::matvec(ch.H[k][j], v[j]));
    Vector direct = lin::matvec(ch.H[k][k], v[k]);
    ok[k] = independent_of_span(interference, direct, tol) ? 1 : 0;
  }
  return ok;
}

bool check_original(const channel::ChannelInstance& ch, const std::vector<Vector>& v, double tol) {
  std::vector<char> ok = check_original_per_user(ch, v, tol);
  return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

ImplicationResult implication_test(const channel::ChannelInstance& ch,
                                   const std::vector<Vector>& v, double tol) {
  ImplicationResult r;
  r.original = check_original(ch, v, tol);
  r.lifted = check_lifted(make_lifted(ch, v), tol);
  return r;
}

DimensionAudit dimension_audit(const LiftedInstance& inst,
                               const std::vector<std::vector<Vector>>& u_blocks, double tol) {
  check_lifted_sizes(inst);
  if (static_cast<int>(u_blocks.size()) != inst.K)
    throw DimensionMismatch("dimension_audit: need K receive-block sets");
  for (const auto& blocks : u_blocks) {
    if (static_cast<int>(blocks.size()) != inst.L)
      throw DimensionMismatch("dimension_audit: need L receive blocks per user");
    for (const Vector& b : blocks)
      if (static_cast<int>(b.size()) != inst.N)
        throw DimensionMismatch("dimension_audit: receive block length != N");
  }

  // Precondition: the blocks solve the lifted zero-forcing equations.
  for (int k = 0; k < inst.K; ++k) {
    double unorm = 0.0;
    for (const Vector& b : u_blocks[k]) {
      double nb = lin::norm(b);
      unorm += nb * nb;
    }
    unorm = std::sqrt(unorm);
    if (unorm <= 0.0) throw NotAZeroForcingSolution("dimension_audit: zero receive blocks");
    for (int j = 0; j < inst.K; ++j) {
      if (j == k) continue;
      cplx resid{};
      double tscale = 0.0;
      for (int l = 0; l < inst.L; ++l) {
        resid += inst.tau[k][j][l] * lin::dot(u_blocks[k][l], inst.v[j]);
        tscale += std::norm(inst.tau[k][j][l]);
      }
      double scale = std::sqrt(tscale) * unorm * lin::norm(inst.v[j]) + 1e-300;
      if (std::abs(resid) > tol * scale)
        throw NotAZeroForcingSolution("dimension_audit: blocks violate lifted zero-forcing");
    }
  }

  DimensionAudit audit;
  audit.users.resize(inst.K);
  for (int k = 0; k < inst.K; ++k) {
    UserDimensionAudit& ua = audit.users[k];
    for (int j = 0; j < inst.K; ++j) {
      if (j == k) continue;
      bool orth_all = true;
      double vn = lin::norm(inst.v[j]);
      for (int l = 0; l < inst.L && orth_all; ++l) {
        double scale = lin::norm(u_blocks[k][l]) * vn + 1e-300;
        if (std::abs(lin::dot(u_blocks[k][l], inst.v[j])) > tol * scale) orth_all = false;
      }
      if (orth_all) ua.omega_k.push_back(j);
    }

    if (!ua.omega_k.empty()) {
      Matrix vs(inst.N, static_cast<int>(ua.omega_k.size()));
      for (size_t c = 0; c < ua.omega_k.size(); ++c)
        for (int i = 0; i < inst.N; ++i) vs(i, static_cast<int>(c)) = inst.v[ua.omega_k[c]][i];
      ua.p_k = lin::numerical_rank(vs, tol);
    }
    Matrix us(inst.N, inst.L);
    for (int l = 0; l < inst.L; ++l)
      for (int i = 0; i < inst.N; ++i) us(i, l) = u_blocks[k][l][i];
    ua.dim_u_k = lin::numerical_rank(us, tol);

    ua.ineq_ok = ua.p_k + ua.dim_u_k <= inst.N;
    ua.claim_applicable = (ua.p_k == inst.N - 1);
    ua.claim_ok = !ua.claim_applicable ||
                  inst.K <= static_cast<int>(ua.omega_k.size()) + inst.L;
    if (!ua.ineq_ok || !ua.claim_ok) audit.all_ok = false;
  }
  return audit;
}

bool variable_count_audit(int K, int N, int L, const std::vector<int>& p, int omega_c_size) {
  if (static_cast<int>(p.size()) != K)
    throw DimensionMismatch("variable_count_audit: need one p_k per user");
  long long sum_p = 0;
  for (int pk : p) sum_p += pk;
  long long budget = static_cast<long long>(K) * ((static_cast<long long>(L) + 1) * N - 2) -
                     static_cast<long long>(L) * sum_p;
  return omega_c_size <= budget;
}

std::vector<std::vector<Vector>> lifted_zf_receivers(const LiftedInstance& inst) {
  check_lifted_sizes(inst);
  std::vector<std::vector<Vector>> out(inst.K);
  for (int k = 0; k < inst.K; ++k) {
    std::vector<Vector> interference;
    for (int j = 0; j < inst.K; ++j)
      if (j != k) interference.push_back(lift(inst.v[j], inst.tau[k][j]));
    std::vector<Vector> onb = lin::orthonormal_basis(interference);
    Vector u = lin::project_out(lift(inst.v[k], inst.tau[k][k]), onb);
    lin::normalize(u);
    out[k].resize(inst.L);
    for (int l = 0; l < inst.L; ++l)
      out[k][l] = Vector(u.begin() + static_cast<long>(l) * inst.N,
                         u.begin() + static_cast<long>(l + 1) * inst.N);
  }
  return out;
}

}  // namespace ia::lifted
