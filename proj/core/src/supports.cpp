#include "ia/supports.hpp"

#include <algorithm>
#include <bit>

#include "ia/errors.hpp"

namespace ia::supports {

int ZfSystem::u_var(int k, int p) const {
  int a = u_anchor[k];
  return k * (nr - 1) + p - (p > a ? 1 : 0);
}

int ZfSystem::v_var(int j, int q) const {
  int a = v_anchor[j];
  return K * (nr - 1) + j * (nt - 1) + q - (q > a ? 1 : 0);
}

namespace {

void check_support(const std::vector<int>& s, int dim, const char* what) {
  if (s.empty()) throw DimensionMismatch(std::string(what) + ": empty support");
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= dim)
      throw DimensionMismatch(std::string(what) + ": index out of range");
    if (i > 0 && s[i] <= s[i - 1])
      throw DimensionMismatch(std::string(what) + ": support must be sorted and unique");
  }
}

bool disjoint_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return true;
}

}  // namespace

SupportPattern SupportPattern::full(int K, int nr, int nt) {
  SupportPattern p;
  p.K = K;
  p.nr = nr;
  p.nt = nt;
  std::vector<int> all_r(nr), all_t(nt);
  for (int i = 0; i < nr; ++i) all_r[i] = i;
  for (int i = 0; i < nt; ++i) all_t[i] = i;
  p.R.assign(K, all_r);
  p.S.assign(K, all_t);
  p.r_anchor.assign(K, 0);
  p.s_anchor.assign(K, 0);
  return p;
}

SupportPattern SupportPattern::from_sets(int K, int nr, int nt, std::vector<std::vector<int>> R,
                                         std::vector<std::vector<int>> S) {
  if (static_cast<int>(R.size()) != K || static_cast<int>(S.size()) != K)
    throw DimensionMismatch("SupportPattern: need K supports per side");
  SupportPattern p;
  p.K = K;
  p.nr = nr;
  p.nt = nt;
  p.R = std::move(R);
  p.S = std::move(S);
  p.r_anchor.resize(K);
  p.s_anchor.resize(K);
  for (int k = 0; k < K; ++k) {
    check_support(p.R[k], nr, "R");
    check_support(p.S[k], nt, "S");
    p.r_anchor[k] = p.R[k].front();
    p.s_anchor[k] = p.S[k].front();
  }
  return p;
}

BlockSupportPattern BlockSupportPattern::from_sets(int K, int T, int Mr, int Mt,
                                                   std::vector<std::vector<int>> Rb,
                                                   std::vector<std::vector<int>> Sb) {
  if (static_cast<int>(Rb.size()) != K || static_cast<int>(Sb.size()) != K)
    throw DimensionMismatch("BlockSupportPattern: need K supports per side");
  BlockSupportPattern p;
  p.K = K;
  p.T = T;
  p.Mr = Mr;
  p.Mt = Mt;
  p.Rb = std::move(Rb);
  p.Sb = std::move(Sb);
  for (int k = 0; k < K; ++k) {
    check_support(p.Rb[k], T, "Rb");
    check_support(p.Sb[k], T, "Sb");
  }
  return p;
}

SupportPattern BlockSupportPattern::to_entry_pattern() const {
  if (Mr != 1 || Mt != 1)
    throw DimensionMismatch("to_entry_pattern: only defined for single-antenna patterns");
  return SupportPattern::from_sets(K, T, T, Rb, Sb);
}

namespace {

/// Structural presence of entry (p, q): some building block is nonzero there.
std::vector<std::pair<int, int>> present_entries(const channel::BuildingBlocks& blocks) {
  std::vector<std::pair<int, int>> out;
  for (int q = 0; q < blocks.nt(); ++q)
    for (int p = 0; p < blocks.nr(); ++p) {
      for (const lin::Matrix& a : blocks.blocks) {
        if (a(p, q) != lin::cplx{}) {
          out.emplace_back(p, q);
          break;
        }
      }
    }
  return out;
}

ZfSystem build_with_anchors(const channel::ChannelFamily& family, int K,
                            const std::vector<int>& u_anchor, const std::vector<int>& v_anchor) {
  channel::BuildingBlocks blocks = channel::build_blocks(family);
  ZfSystem sys;
  sys.K = K;
  sys.nr = blocks.nr();
  sys.nt = blocks.nt();
  sys.u_anchor = u_anchor;
  sys.v_anchor = v_anchor;
  sys.n = K * (sys.nr - 1) + K * (sys.nt - 1);

  std::vector<std::pair<int, int>> entries = present_entries(blocks);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      ZfEquation eq;
      eq.rx = k;
      eq.tx = j;
      for (auto [p, q] : entries) {
        bool ua = (p == u_anchor[k]);
        bool va = (q == v_anchor[j]);
        if (ua && va) {
          eq.has_constant = true;
        } else if (ua) {
          eq.monomials.push_back({sys.v_var(j, q)});
        } else if (va) {
          eq.monomials.push_back({sys.u_var(k, p)});
        } else {
          int a = sys.u_var(k, p), b = sys.v_var(j, q);
          if (a > b) std::swap(a, b);
          eq.monomials.push_back({a, b});
        }
      }
      std::sort(eq.monomials.begin(), eq.monomials.end());
      eq.monomials.erase(std::unique(eq.monomials.begin(), eq.monomials.end()),
                         eq.monomials.end());
      sys.equations.push_back(std::move(eq));
    }
  }
  return sys;
}

}  // namespace

ZfSystem build_zf_system(const channel::ChannelFamily& family, int K) {
  if (K < 1) throw DimensionMismatch("build_zf_system: K must be >= 1");
  return build_with_anchors(family, K, std::vector<int>(K, 0), std::vector<int>(K, 0));
}

ZfSystem build_zf_system(const channel::ChannelFamily& family, int K,
                         const SupportPattern& pattern) {
  if (pattern.K != K) throw DimensionMismatch("build_zf_system: pattern K mismatch");
  if (pattern.nr != family.nr() || pattern.nt != family.nt())
    throw DimensionMismatch("build_zf_system: pattern dimensions mismatch family");
  return build_with_anchors(family, K, pattern.r_anchor, pattern.s_anchor);
}

ZfSystem restrict_system(const ZfSystem& sys, const std::vector<int>& J) {
  std::vector<char> keep(sys.n, 0);
  for (int v : J) {
    if (v < 0 || v >= sys.n) throw DimensionMismatch("restrict_system: variable out of range");
    keep[v] = 1;
  }
  ZfSystem out = sys;
  for (ZfEquation& eq : out.equations) {
    std::vector<std::vector<int>> kept;
    for (std::vector<int>& mon : eq.monomials) {
      bool inside = true;
      for (int v : mon)
        if (!keep[v]) {
          inside = false;
          break;
        }
      if (inside) kept.push_back(std::move(mon));
    }
    eq.monomials = std::move(kept);
  }
  return out;
}

int count_nonzero(const ZfSystem& sys) {
  int c = 0;
  for (const ZfEquation& eq : sys.equations)
    if (eq.has_constant || !eq.monomials.empty()) ++c;
  return c;
}

bool improper_everywhere(const ZfSystem& sys) {
  if (sys.n > 22) throw TooLarge("improper_everywhere: more than 22 free variables");
  int m = sys.m();

  // Bitmask skeleton per equation: constant flag + monomial masks.
  std::vector<char> has_const(m);
  std::vector<std::vector<std::uint32_t>> masks(m);
  for (int e = 0; e < m; ++e) {
    has_const[e] = sys.equations[e].has_constant ? 1 : 0;
    for (const std::vector<int>& mon : sys.equations[e].monomials) {
      std::uint32_t msk = 0;
      for (int v : mon) msk |= (1u << v);
      masks[e].push_back(msk);
    }
  }

  std::uint64_t total = 1ull << sys.n;
  for (std::uint64_t j = 0; j < total; ++j) {
    auto bits = static_cast<std::uint32_t>(j);
    int need = std::popcount(bits) + 1;
    int alive = 0;
    for (int e = 0; e < m && alive < need; ++e) {
      if (has_const[e]) {
        ++alive;
        continue;
      }
      for (std::uint32_t msk : masks[e]) {
        if ((msk & ~bits) == 0) {
          ++alive;
          break;
        }
      }
    }
    if (alive < need) return false;
  }
  return true;
}

std::vector<int> pattern_variables(const ZfSystem& sys, const SupportPattern& pattern) {
  if (pattern.K != sys.K || pattern.nr != sys.nr || pattern.nt != sys.nt)
    throw DimensionMismatch("pattern_variables: pattern does not match system");
  for (int k = 0; k < sys.K; ++k)
    if (pattern.r_anchor[k] != sys.u_anchor[k] || pattern.s_anchor[k] != sys.v_anchor[k])
      throw DimensionMismatch("pattern_variables: anchors differ from the system's");
  std::vector<int> J;
  for (int k = 0; k < sys.K; ++k)
    for (int p : pattern.R[k])
      if (p != pattern.r_anchor[k]) J.push_back(sys.u_var(k, p));
  for (int j = 0; j < sys.K; ++j)
    for (int q : pattern.S[j])
      if (q != pattern.s_anchor[j]) J.push_back(sys.v_var(j, q));
  std::sort(J.begin(), J.end());
  return J;
}

namespace {

template <typename P>
CountReport partition_impl(const P& pattern, const std::vector<std::vector<int>>& R,
                           const std::vector<std::vector<int>>& S) {
  CountReport rep;
  for (int k = 0; k < pattern.K; ++k)
    for (int j = 0; j < pattern.K; ++j) {
      if (j == k) continue;
      if (disjoint_sorted(R[k], S[j]))
        rep.omega.emplace_back(k, j);
      else
        rep.omega_c.emplace_back(k, j);
    }
  rep.PJ_size = static_cast<int>(rep.omega_c.size());
  return rep;
}

}  // namespace

CountReport omega_partition(const SupportPattern& pattern) {
  return partition_impl(pattern, pattern.R, pattern.S);
}

CountReport omega_partition(const BlockSupportPattern& pattern) {
  return partition_impl(pattern, pattern.Rb, pattern.Sb);
}

int free_variable_count(const SupportPattern& pattern) {
  int s = 0;
  for (int k = 0; k < pattern.K; ++k)
    s += static_cast<int>(pattern.R[k].size() + pattern.S[k].size());
  return s - 2 * pattern.K;
}

int free_variable_count(const BlockSupportPattern& pattern) {
  int s = 0;
  for (int k = 0; k < pattern.K; ++k)
    s += static_cast<int>(pattern.Rb[k].size()) * pattern.Mr +
         static_cast<int>(pattern.Sb[k].size()) * pattern.Mt;
  return s - 2 * pattern.K;
}

CountReport counting_verdict(const SupportPattern& pattern) {
  CountReport rep = omega_partition(pattern);
  rep.J_size = free_variable_count(pattern);
  rep.J_is_upper_bound = false;
  rep.ruled_out = rep.PJ_size > rep.J_size;
  return rep;
}

CountReport counting_verdict(const BlockSupportPattern& pattern) {
  CountReport rep = omega_partition(pattern);
  rep.J_size = free_variable_count(pattern);
  rep.J_is_upper_bound = (pattern.Mr != 1 || pattern.Mt != 1);
  rep.ruled_out = rep.PJ_size > rep.J_size;
  return rep;
}

namespace {

template <typename P>
bool audit_impl(int K, int T, const std::vector<std::vector<int>>& R,
                const std::vector<std::vector<int>>& S, const std::function<int(int)>& f_upper) {
  for (int k = 0; k < K; ++k) {
    int rx_disjoint = 0;
    for (int j = 0; j < K; ++j)
      if (j != k && disjoint_sorted(R[k], S[j])) ++rx_disjoint;
    if (rx_disjoint > f_upper(T - static_cast<int>(R[k].size()))) return false;
  }
  for (int j = 0; j < K; ++j) {
    int tx_disjoint = 0;
    for (int k = 0; k < K; ++k)
      if (k != j && disjoint_sorted(R[k], S[j])) ++tx_disjoint;
    if (tx_disjoint > f_upper(T - static_cast<int>(S[j].size()))) return false;
  }
  return true;
}

}  // namespace

bool induction_audit(const SupportPattern& pattern, const std::function<int(int)>& f_upper) {
  if (pattern.nr != pattern.nt)
    throw DimensionMismatch("induction_audit: entry-level audit requires nr == nt");
  return audit_impl<SupportPattern>(pattern.K, pattern.nr, pattern.R, pattern.S, f_upper);
}

bool induction_audit(const BlockSupportPattern& pattern, const std::function<int(int)>& f_upper) {
  return audit_impl<BlockSupportPattern>(pattern.K, pattern.T, pattern.Rb, pattern.Sb, f_upper);
}

std::function<int(int)> default_f_upper(int Mr, int Mt) {
  int slope = Mr + Mt;
  return [slope](int x) { return x <= 0 ? 0 : slope * x - 1; };
}

std::uint64_t enumerate_block_patterns(
    const channel::ChannelFamily& family, int K, std::uint64_t budget,
    const std::function<void(const BlockSupportPattern&, const CountReport&)>& fn) {
  family.validate();
  if (K < 1) throw DimensionMismatch("enumerate_block_patterns: K must be >= 1");
  int T = family.T;
  if (T > 62) throw TooLarge("enumerate_block_patterns: T too large");

  // (2^T - 1)^(2K) patterns; overflow-safe comparison against the budget.
  std::uint64_t per_digit = (1ull << T) - 1;
  std::uint64_t total = 1;
  for (int d = 0; d < 2 * K; ++d) {
    if (total > budget / per_digit)
      throw BudgetExceeded("enumerate_block_patterns: pattern count exceeds budget");
    total *= per_digit;
  }
  if (total > budget)
    throw BudgetExceeded("enumerate_block_patterns: pattern count exceeds budget");

  std::vector<std::uint64_t> digit(2 * K, 1);  // masks in [1, 2^T - 1]
  BlockSupportPattern pat;
  pat.K = K;
  pat.T = T;
  pat.Mr = family.Mr;
  pat.Mt = family.Mt;
  pat.Rb.assign(K, {});
  pat.Sb.assign(K, {});

  std::uint64_t visited = 0;
  while (true) {
    for (int k = 0; k < K; ++k) {
      pat.Rb[k].clear();
      pat.Sb[k].clear();
      for (int t = 0; t < T; ++t) {
        if (digit[k] & (1ull << t)) pat.Rb[k].push_back(t);
        if (digit[K + k] & (1ull << t)) pat.Sb[k].push_back(t);
      }
    }
    fn(pat, counting_verdict(pat));
    ++visited;

    int d = 2 * K - 1;
    while (d >= 0) {
      if (++digit[d] <= per_digit) break;
      digit[d] = 1;
      --d;
    }
    if (d < 0) break;
  }
  return visited;
}

}  // namespace ia::supports
