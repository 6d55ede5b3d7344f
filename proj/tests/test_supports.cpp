#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "ia/channel.hpp"
#include "ia/errors.hpp"
#include "ia/rng.hpp"
#include "ia/solver.hpp"
#include "ia/supports.hpp"

using namespace ia;
using namespace ia::channel;
using namespace ia::supports;

namespace {

// Independent reimplementation of the everywhere-overdetermined check,
// straight from the definition, for cross-validation on small systems.
bool brute_improper(const ZfSystem& sys) {
  int n = sys.n;
  REQUIRE(n <= 16);
  for (std::uint32_t J = 0; J < (1u << n); ++J) {
    int pj = 0;
    for (const auto& eq : sys.equations) {
      bool alive = eq.has_constant;
      for (const auto& mon : eq.monomials) {
        bool inside = true;
        for (int v : mon)
          if (!((J >> v) & 1u)) inside = false;
        if (inside) {
          alive = true;
          break;
        }
      }
      if (alive) ++pj;
    }
    int jsize = 0;
    for (int v = 0; v < n; ++v) jsize += (J >> v) & 1u;
    if (pj < jsize + 1) return false;
  }
  return true;
}

std::vector<std::vector<int>> all_nonempty_subsets(int T) {
  std::vector<std::vector<int>> out;
  for (std::uint32_t m = 1; m < (1u << T); ++m) {
    std::vector<int> s;
    for (int t = 0; t < T; ++t)
      if ((m >> t) & 1u) s.push_back(t);
    out.push_back(std::move(s));
  }
  return out;
}

ZfSystem three_equation_fixture() {
  // Two variables x0, x1; no constants:
  //   f1 = a1 x0^2 + a2 x0        -> monomial set {{0}}
  //   f2 = b1 x0 x1 + b2 x0       -> {{0,1},{0}}
  //   f3 = c1 x0 x1^3 + c2 x0     -> {{0,1},{0}}
  ZfSystem sys;
  sys.n = 2;
  sys.K = 3;
  sys.nr = sys.nt = 1;
  ZfEquation f1, f2, f3;
  f1.monomials = {{0}};
  f2.monomials = {{0, 1}, {0}};
  f3.monomials = {{0, 1}, {0}};
  sys.equations = {f1, f2, f3};
  return sys;
}

}  // namespace

TEST_CASE("zero-forcing skeleton of a constant 2x2 channel") {
  auto sys = build_zf_system(ChannelFamily::mimo_constant(2, 2), 3);
  CHECK(sys.n == 6);  // K (nr - 1) + K (nt - 1)
  CHECK(sys.m() == 6);
  for (const auto& eq : sys.equations) {
    CHECK(eq.rx != eq.tx);
    CHECK(eq.has_constant);  // anchored entries hit a generic matrix entry
    CHECK(eq.monomials.size() == 3);  // (0,1), (1,0), (1,1) terms
  }
  // Variable indices cover 0..n-1 exactly once.
  std::set<int> seen;
  for (int k = 0; k < 3; ++k) {
    seen.insert(sys.u_var(k, 1));
    seen.insert(sys.v_var(k, 1));
  }
  CHECK(static_cast<int>(seen.size()) == sys.n);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == sys.n - 1);
}

TEST_CASE("zero-forcing skeleton of extended siso links") {
  auto sys = build_zf_system(ChannelFamily::siso_generic_ext(2), 3);
  CHECK(sys.n == 6);
  CHECK(sys.m() == 6);
  for (const auto& eq : sys.equations) {
    CHECK(eq.has_constant);  // slot 0 carries both anchors
    REQUIRE(eq.monomials.size() == 1);
    REQUIRE(eq.monomials[0].size() == 2);  // slot 1: one u and one v variable
    CHECK(eq.monomials[0][0] == sys.u_var(eq.rx, 1));
    CHECK(eq.monomials[0][1] == sys.v_var(eq.tx, 1));
  }

  // Without extensions there are no free variables at all.
  auto flat = build_zf_system(ChannelFamily::siso_generic_ext(1), 2);
  CHECK(flat.n == 0);
  CHECK(flat.m() == 2);
  for (const auto& eq : flat.equations) {
    CHECK(eq.has_constant);
    CHECK(eq.monomials.empty());
  }

  // A frequency-selective link shares the diagonal skeleton.
  auto taps = build_zf_system(ChannelFamily::siso_l_tap(2, {0, 1}), 3);
  CHECK(taps.n == sys.n);
  CHECK(taps.m() == sys.m());
  for (int e = 0; e < sys.m(); ++e) {
    CHECK(taps.equations[e].has_constant == sys.equations[e].has_constant);
    CHECK(taps.equations[e].monomials == sys.equations[e].monomials);
  }
}

TEST_CASE("restriction keeps constants and inside monomials only") {
  auto sys = three_equation_fixture();
  CHECK(count_nonzero(sys) == 3);

  auto only_x1 = restrict_system(sys, {1});
  CHECK(count_nonzero(only_x1) == 0);  // every term touches x0

  auto only_x0 = restrict_system(sys, {0});
  CHECK(count_nonzero(only_x0) == 3);  // the x0-only term survives everywhere

  CHECK(count_nonzero(restrict_system(sys, {})) == 0);
  CHECK(count_nonzero(restrict_system(sys, {0, 1})) == 3);
  CHECK_THROWS_AS(restrict_system(sys, {2}), DimensionMismatch);

  // No constants anywhere, so the empty restriction kills the fixture and
  // the everywhere-overdetermined certificate cannot hold.
  CHECK_FALSE(improper_everywhere(sys));
}

TEST_CASE("restriction count grows monotonically with the variable set") {
  auto sys = build_zf_system(ChannelFamily::siso_generic_ext(3), 3);
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> small, large;
    for (int v = 0; v < sys.n; ++v) {
      double x = rng.uniform();
      if (x < 0.3) small.push_back(v);
      if (x < 0.6) large.push_back(v);  // superset of small
    }
    CHECK(count_nonzero(restrict_system(sys, small)) <=
          count_nonzero(restrict_system(sys, large)));
  }
}

TEST_CASE("constant mimo systems survive every restriction whole") {
  auto sys = build_zf_system(ChannelFamily::mimo_constant(2, 3), 3);
  const int all = sys.K * (sys.K - 1);
  CHECK(count_nonzero(sys) == all);
  CHECK(count_nonzero(restrict_system(sys, {})) == all);
  Rng rng(90);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> J;
    for (int v = 0; v < sys.n; ++v)
      if (rng.uniform() < 0.5) J.push_back(v);
    CHECK(count_nonzero(restrict_system(sys, J)) == all);
  }
}

TEST_CASE("everywhere-overdetermined certificate on reference cases") {
  CHECK(improper_everywhere(build_zf_system(ChannelFamily::mimo_constant(2, 2), 4)));
  CHECK_FALSE(improper_everywhere(build_zf_system(ChannelFamily::mimo_constant(2, 2), 3)));
  CHECK_FALSE(improper_everywhere(build_zf_system(ChannelFamily::siso_generic_ext(3), 3)));
  CHECK_FALSE(improper_everywhere(build_zf_system(ChannelFamily::siso_generic_ext(2), 2)));
}

TEST_CASE("everywhere-overdetermined matches a brute-force subset scan") {
  std::vector<ZfSystem> cases = {
      build_zf_system(ChannelFamily::mimo_constant(2, 2), 3),
      build_zf_system(ChannelFamily::mimo_constant(2, 2), 4),
      build_zf_system(ChannelFamily::siso_generic_ext(2), 3),
      build_zf_system(ChannelFamily::siso_generic_ext(3), 2),
      build_zf_system(ChannelFamily::siso_generic_ext(4), 2),
      three_equation_fixture(),
  };
  for (const auto& sys : cases) CHECK(improper_everywhere(sys) == brute_improper(sys));
}

TEST_CASE("certificate scan refuses oversized systems") {
  // 4 users, 4 extensions: 24 free variables.
  CHECK_THROWS_AS(improper_everywhere(build_zf_system(ChannelFamily::siso_generic_ext(4), 4)),
                  TooLarge);
}

TEST_CASE("support pattern constructors validate their sets") {
  CHECK_THROWS_AS(SupportPattern::from_sets(2, 2, 2, {{0}}, {{0}, {1}}), DimensionMismatch);
  CHECK_THROWS_AS(SupportPattern::from_sets(1, 2, 2, {{}}, {{0}}), DimensionMismatch);
  CHECK_THROWS_AS(SupportPattern::from_sets(1, 2, 2, {{0, 2}}, {{0}}), DimensionMismatch);
  CHECK_THROWS_AS(SupportPattern::from_sets(1, 2, 2, {{1, 0}}, {{0}}), DimensionMismatch);
  CHECK_THROWS_AS(BlockSupportPattern::from_sets(1, 2, 1, 1, {{0, 0}}, {{0}}),
                  DimensionMismatch);

  auto p = SupportPattern::full(3, 2, 2);
  CHECK(p.R[0] == std::vector<int>{0, 1});
  CHECK(p.r_anchor[0] == 0);

  auto bp = BlockSupportPattern::from_sets(2, 3, 1, 1, {{0}, {1, 2}}, {{2}, {0}});
  auto ep = bp.to_entry_pattern();
  CHECK(ep.R == bp.Rb);
  CHECK(ep.S == bp.Sb);
  auto wide = BlockSupportPattern::from_sets(1, 2, 2, 1, {{0}}, {{0}});
  CHECK_THROWS_AS(wide.to_entry_pattern(), DimensionMismatch);
}

TEST_CASE("omega partition splits cross pairs by support disjointness") {
  // Full supports never separate anyone.
  auto full = SupportPattern::full(3, 2, 2);
  auto rep = omega_partition(full);
  CHECK(rep.omega.empty());
  CHECK(static_cast<int>(rep.omega_c.size()) == 6);
  CHECK(rep.PJ_size == 6);
  CHECK_FALSE(rep.J_is_upper_bound);

  // One slot per user on the diagonal: every cross pair is separated.
  auto diag = SupportPattern::from_sets(3, 3, 3, {{0}, {1}, {2}}, {{0}, {1}, {2}});
  rep = omega_partition(diag);
  CHECK(static_cast<int>(rep.omega.size()) == 6);
  CHECK(rep.omega_c.empty());
  CHECK(rep.PJ_size == 0);

  auto split = SupportPattern::from_sets(2, 2, 2, {{0}, {1}}, {{0}, {1}});
  rep = omega_partition(split);
  CHECK(static_cast<int>(rep.omega.size()) == 2);

  auto block = BlockSupportPattern::from_sets(2, 2, 2, 2, {{0}, {1}}, {{0}, {1}});
  CHECK(counting_verdict(block).J_is_upper_bound);
  CHECK_FALSE(counting_verdict(full).J_is_upper_bound);
}

TEST_CASE("omega partition is a partition, on random patterns") {
  Rng rng(1234);
  auto subsets = all_nonempty_subsets(3);
  for (int trial = 0; trial < 200; ++trial) {
    int K = 2 + static_cast<int>(rng.uniform() * 3);
    std::vector<std::vector<int>> R, S;
    for (int k = 0; k < K; ++k) {
      R.push_back(subsets[static_cast<size_t>(rng.uniform() * subsets.size())]);
      S.push_back(subsets[static_cast<size_t>(rng.uniform() * subsets.size())]);
    }
    auto pat = SupportPattern::from_sets(K, 3, 3, R, S);
    auto rep = omega_partition(pat);
    CHECK(static_cast<int>(rep.omega.size() + rep.omega_c.size()) == K * (K - 1));
    std::set<std::pair<int, int>> seen;
    for (auto pr : rep.omega) seen.insert(pr);
    for (auto pr : rep.omega_c) seen.insert(pr);
    CHECK(static_cast<int>(seen.size()) == K * (K - 1));
    for (auto [k, j] : seen) CHECK(k != j);
    CHECK(rep.PJ_size == static_cast<int>(rep.omega_c.size()));
  }
}

TEST_CASE("free variable counts") {
  // Entry level is exact: sum (|R_k| + |S_k|) - 2K.
  auto p1 = SupportPattern::from_sets(3, 3, 3, {{0, 1}, {0, 2}, {1, 2}}, {{0}, {1}, {2}});
  CHECK(free_variable_count(p1) == 3);
  CHECK(free_variable_count(SupportPattern::full(4, 2, 2)) == 8);

  // Block level bounds by antenna count: sum (|Rb| Mr + |Sb| Mt) - 2K.
  auto bp = BlockSupportPattern::from_sets(2, 2, 2, 2, {{0}, {1}}, {{0}, {1}});
  CHECK(free_variable_count(bp) == 4);
}

TEST_CASE("counting verdict rules out overloaded full patterns only") {
  auto full42 = counting_verdict(SupportPattern::full(4, 2, 2));
  CHECK(full42.J_size == 8);
  CHECK(full42.PJ_size == 12);
  CHECK(full42.ruled_out);  // 12 >= 8 + 1

  auto full22 = counting_verdict(SupportPattern::full(2, 2, 2));
  CHECK(full22.J_size == 4);
  CHECK(full22.PJ_size == 2);
  CHECK_FALSE(full22.ruled_out);

  // Fully separated users: nothing survives, nothing is overdetermined.
  auto diag = counting_verdict(
      SupportPattern::from_sets(3, 3, 3, {{0}, {1}, {2}}, {{0}, {1}, {2}}));
  CHECK(diag.J_size == 0);
  CHECK(diag.PJ_size == 0);
  CHECK_FALSE(diag.ruled_out);
}

TEST_CASE("induction audit accepts genuine shapes and rejects lopsided ones") {
  auto f11 = default_f_upper(1, 1);
  CHECK(f11(0) == 0);
  CHECK(f11(1) == 1);
  CHECK(f11(2) == 3);
  CHECK(f11(-1) == 0);
  CHECK(default_f_upper(2, 2)(1) == 3);

  // Full supports: nobody is separated, audit passes at every size.
  CHECK(induction_audit(SupportPattern::full(4, 2, 2), f11));

  // Everyone transmits on slot 0 but receives clear of it: each receiver is
  // separated from K-1 = 2 transmitters yet gave up only one slot.
  auto lopsided = SupportPattern::from_sets(3, 3, 3, {{1, 2}, {1, 2}, {1, 2}},
                                            {{0}, {0}, {0}});
  CHECK_FALSE(induction_audit(lopsided, f11));

  // One private slot per user: separation 2 within the budget f(2) = 3.
  auto diag = SupportPattern::from_sets(3, 3, 3, {{0}, {1}, {2}}, {{0}, {1}, {2}});
  CHECK(induction_audit(diag, f11));

  auto rect = SupportPattern::from_sets(1, 2, 3, {{0}}, {{0}});
  CHECK_THROWS_AS(induction_audit(rect, f11), DimensionMismatch);

  auto block = BlockSupportPattern::from_sets(2, 2, 2, 2, {{0}, {1}}, {{0}, {1}});
  CHECK(induction_audit(block, default_f_upper(2, 2)));
}

TEST_CASE("surviving-equation count equals the overlap count, exhaustively") {
  // For diagonal families the pattern-restricted system keeps exactly the
  // equations of overlapping cross pairs.
  for (int T = 1; T <= 3; ++T) {
    auto fam = ChannelFamily::siso_generic_ext(T);
    auto subsets = all_nonempty_subsets(T);
    for (int K = 2; K <= 3; ++K) {
      std::vector<size_t> pick(2 * K, 0);
      bool done = false;
      while (!done) {
        std::vector<std::vector<int>> R, S;
        for (int k = 0; k < K; ++k) R.push_back(subsets[pick[k]]);
        for (int k = 0; k < K; ++k) S.push_back(subsets[pick[K + k]]);
        auto pat = SupportPattern::from_sets(K, T, T, R, S);
        auto sys = build_zf_system(fam, K, pat);
        auto J = pattern_variables(sys, pat);
        CHECK(count_nonzero(restrict_system(sys, J)) == omega_partition(pat).PJ_size);
        // Odometer over all (2^T - 1)^(2K) choices.
        size_t d = 0;
        while (d < pick.size() && ++pick[d] == subsets.size()) pick[d++] = 0;
        done = d == pick.size();
      }
    }
  }
}

TEST_CASE("surviving-equation count equals the overlap count, sampled at K=4") {
  auto fam = ChannelFamily::siso_generic_ext(3);
  auto subsets = all_nonempty_subsets(3);
  Rng rng(777);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::vector<int>> R, S;
    for (int k = 0; k < 4; ++k) {
      R.push_back(subsets[static_cast<size_t>(rng.uniform() * subsets.size())]);
      S.push_back(subsets[static_cast<size_t>(rng.uniform() * subsets.size())]);
    }
    auto pat = SupportPattern::from_sets(4, 3, 3, R, S);
    auto sys = build_zf_system(fam, 4, pat);
    auto J = pattern_variables(sys, pat);
    CHECK(count_nonzero(restrict_system(sys, J)) == omega_partition(pat).PJ_size);
  }
}

TEST_CASE("pattern variables demand matching anchors") {
  auto fam = ChannelFamily::siso_generic_ext(2);
  auto pat = SupportPattern::from_sets(2, 2, 2, {{1}, {0, 1}}, {{0}, {1}});
  auto sys_plain = build_zf_system(fam, 2);  // anchors all at 0
  CHECK_THROWS_AS(pattern_variables(sys_plain, pat), DimensionMismatch);
  auto sys = build_zf_system(fam, 2, pat);
  auto J = pattern_variables(sys, pat);
  // Free variables: user 0 contributes none on R (anchor 1 is its only slot),
  // user 1 contributes slot 1 on R; transmit side mirrors.
  CHECK(static_cast<int>(J.size()) == free_variable_count(pat));
}

TEST_CASE("block pattern enumeration visits everything in order") {
  auto fam = ChannelFamily::siso_generic_ext(2);
  std::vector<std::uint64_t> keys;
  std::uint64_t visited = enumerate_block_patterns(
      fam, 2, 1000000, [&](const BlockSupportPattern& p, const CountReport& rep) {
        std::uint64_t key = 0;
        for (int k = 0; k < p.K; ++k) {
          std::uint64_t m = 0;
          for (int t : p.Rb[k]) m |= (1ull << t);
          key = key * 4 + m;
        }
        for (int k = 0; k < p.K; ++k) {
          std::uint64_t m = 0;
          for (int t : p.Sb[k]) m |= (1ull << t);
          key = key * 4 + m;
        }
        keys.push_back(key);
        auto direct = counting_verdict(p);
        CHECK(rep.ruled_out == direct.ruled_out);
        CHECK(rep.PJ_size == direct.PJ_size);
        CHECK(rep.J_size == direct.J_size);
      });
  CHECK(visited == 81);  // (2^2 - 1)^4
  REQUIRE(keys.size() == 81);
  for (size_t i = 1; i < keys.size(); ++i) CHECK(keys[i - 1] < keys[i]);
}

TEST_CASE("block pattern enumeration respects its budget") {
  auto fam = ChannelFamily::siso_generic_ext(2);
  CHECK_THROWS_AS(enumerate_block_patterns(fam, 2, 80, [](auto&, auto&) {}),
                  BudgetExceeded);
  CHECK(enumerate_block_patterns(fam, 2, 81, [](auto&, auto&) {}) == 81);

  // Constant channels have a single all-slots pattern, instantly killed.
  int calls = 0;
  enumerate_block_patterns(ChannelFamily::siso_generic_ext(1), 2, 10,
                           [&](const BlockSupportPattern&, const CountReport& rep) {
                             ++calls;
                             CHECK(rep.PJ_size == 2);
                             CHECK(rep.J_size == 0);
                             CHECK(rep.ruled_out);
                           });
  CHECK(calls == 1);
}

TEST_CASE("empirical supports of an aligned solution are never ruled out") {
  // Solve a feasible network, read off the beam supports, and check the
  // counting argument does not contradict the witness.
  auto bb = build_blocks(ChannelFamily::siso_generic_ext(3));
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto ch = sample_instance(bb, 3, 900 + s);
    solver::SolverConfig cfg;
    cfg.seed = split_seed(900 + s, 1);
    auto [beams, rep] = solver::solve(ch, cfg);
    REQUIRE(rep.verdict == solver::Verdict::Feasible);
    std::vector<std::vector<int>> R, S;
    for (int k = 0; k < 3; ++k) {
      std::vector<int> r, sset;
      for (int t = 0; t < 3; ++t) {
        if (std::abs(beams.u[k][t]) > 1e-6) r.push_back(t);
        if (std::abs(beams.v[k][t]) > 1e-6) sset.push_back(t);
      }
      R.push_back(r);
      S.push_back(sset);
    }
    auto pat = SupportPattern::from_sets(3, 3, 3, R, S);
    CHECK_FALSE(counting_verdict(pat).ruled_out);
  }
}
