#include "ia/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "ia/errors.hpp"

namespace ia::bounds {

int max_users_generic_ext(int Mt, int Mr, int T) {
  if (Mt < 1 || Mr < 1 || T < 1) throw DimensionMismatch("max_users_generic_ext: bad parameters");
  return (Mr + Mt) * T - 1;
}

int achievable_users_generic_ext(int Mt, int Mr, int T) {
  if (Mt < 1 || Mr < 1 || T < 1)
    throw DimensionMismatch("achievable_users_generic_ext: bad parameters");
  return (Mr + Mt - 1) * T;
}

long long max_users_diversity(int N, int L) {
  if (N < 1 || L < 1) throw DimensionMismatch("max_users_diversity: bad parameters");
  long long n = N, l = L;
  return (4 * n * l + n * n) / 4;  // floor(NL + N^2/4)
}

double siso_dof_upper(int K, int T, int L) {
  if (K < 1 || T < 1 || L < 1) throw DimensionMismatch("siso_dof_upper: bad parameters");
  return std::min(std::sqrt(1.25 * K), L + T / 4.0);
}

double mimo_dof_upper(int Mt, int Mr, int K) {
  if (Mt < 1 || Mr < 1 || K < 1) throw DimensionMismatch("mimo_dof_upper: bad parameters");
  if (Mt > Mr) std::swap(Mt, Mr);
  return Mt * std::sqrt(1.25 * Mr * K);
}

long long orthogonal_lower_bound(int N, int L) {
  if (N < 1 || L < 1) throw DimensionMismatch("orthogonal_lower_bound: bad parameters");
  return static_cast<long long>(N) * L;
}

int max_users_constant_mimo(int Mt, int Mr) {
  if (Mt < 1 || Mr < 1) throw DimensionMismatch("max_users_constant_mimo: bad parameters");
  return Mt + Mr - 1;
}

BoundReport bound_report(const channel::ChannelFamily& family, std::optional<int> K) {
  using channel::FamilyKind;
  family.validate();

  BoundReport rep;
  rep.N = std::min(family.nt(), family.nr());
  rep.L = family.L();
  rep.T = family.T;
  rep.K = K;

  rep.upper_K = max_users_diversity(rep.N, rep.L);
  rep.formula_tags.push_back("diversity_upper");

  switch (family.kind) {
    case FamilyKind::SisoGenericExt:
    case FamilyKind::MimoGenericExt: {
      long long ext = max_users_generic_ext(family.Mt, family.Mr, family.T);
      rep.upper_K = std::min(rep.upper_K, ext);
      rep.formula_tags.push_back("generic_ext_upper");
      rep.ext_upper_tightens_at_t2 = family.T >= 2;
      break;
    }
    case FamilyKind::MimoConstant: {
      long long cm = max_users_constant_mimo(family.Mt, family.Mr);
      rep.upper_K = std::min(rep.upper_K, cm);
      rep.formula_tags.push_back("constant_mimo_upper");
      break;
    }
    default:
      break;
  }

  // Constructive floor: the per-slot orthogonalization capacity implemented
  // by the solver's scheme.
  switch (family.kind) {
    case FamilyKind::SisoGenericExt:
    case FamilyKind::SisoLTap:
    case FamilyKind::SisoBlockFading:
      rep.achievable_K = family.T;
      rep.formula_tags.push_back("orthogonal_scheme_lower");
      break;
    case FamilyKind::MimoConstant:
      rep.achievable_K = family.Mt + family.Mr - 1;
      rep.formula_tags.push_back("orthogonal_scheme_lower");
      break;
    case FamilyKind::MimoConstantExt:
    case FamilyKind::MimoGenericExt:
      rep.achievable_K = static_cast<long long>(family.Mt + family.Mr - 1) * family.T;
      rep.formula_tags.push_back("orthogonal_scheme_lower");
      if (family.kind == FamilyKind::MimoGenericExt)
        rep.formula_tags.push_back("generic_ext_achievable");
      break;
    case FamilyKind::AcsConstant:
      rep.achievable_K = 2LL * family.T;
      rep.formula_tags.push_back("orthogonal_scheme_lower");
      break;
    case FamilyKind::Custom:
      rep.achievable_K = 0;  // no generic construction for arbitrary blocks
      break;
  }
  if (rep.achievable_K == orthogonal_lower_bound(rep.N, rep.L) && rep.achievable_K > 0)
    rep.formula_tags.push_back("diversity_product_lower");

  rep.dof_upper = static_cast<double>(rep.upper_K) / rep.T;
  rep.dof_lower = static_cast<double>(rep.achievable_K) / rep.T;
  if (K) rep.K_within_upper = *K <= rep.upper_K;
  return rep;
}

}  // namespace ia::bounds
