// iafeas: command line front end for the IA feasibility toolkit.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 I/O error,
// 1 anything else.

#include <charconv>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ia/bounds.hpp"
#include "ia/channel.hpp"
#include "ia/errors.hpp"
#include "ia/json_io.hpp"
#include "ia/lifted.hpp"
#include "ia/rng.hpp"
#include "ia/solver.hpp"
#include "ia/supports.hpp"
#include "ia/sweep.hpp"

namespace {

using nlohmann::ordered_json;

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// "k=v,k=v"; list values inside a pair use ':' (commas delimit pairs).
std::map<std::string, std::string> parse_params(const std::string& s) {
  std::map<std::string, std::string> m;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    std::string item =
        comma == std::string::npos ? s.substr(pos) : s.substr(pos, comma - pos);
    item = trim(item);
    if (!item.empty()) {
      size_t eq = item.find('=');
      if (eq == std::string::npos)
        throw ia::ConfigError("bad --params item (want key=value): " + item);
      std::string key = trim(item.substr(0, eq));
      std::string val = trim(item.substr(eq + 1));
      if (key.empty()) throw ia::ConfigError("bad --params item: " + item);
      m[key] = val;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return m;
}

std::string num(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string verdict_name(ia::solver::Verdict v) {
  return v == ia::solver::Verdict::Feasible ? "Feasible" : "Undetermined";
}

ordered_json pairs_json(const std::vector<std::pair<int, int>>& pairs) {
  ordered_json arr = ordered_json::array();
  for (auto [k, j] : pairs) arr.push_back(ordered_json::array({k, j}));
  return arr;
}

ordered_json count_report_json(const ia::supports::CountReport& r,
                               std::optional<bool> audit) {
  ordered_json j;
  j["J_size"] = r.J_size;
  j["J_is_upper_bound"] = r.J_is_upper_bound;
  j["PJ_size"] = r.PJ_size;
  j["omega_c"] = pairs_json(r.omega_c);
  j["ruled_out"] = r.ruled_out;
  if (audit)
    j["audit"] = *audit;
  else
    j["audit"] = nullptr;
  return j;
}

struct FamilyArgs {
  std::string name;
  std::string params;

  void attach(CLI::App* sub) {
    sub->add_option("--family", name,
                    "channel family: siso_generic_ext, siso_l_tap, siso_block_fading, "
                    "mimo_constant, mimo_constant_ext, mimo_generic_ext, acs_constant")
        ->required();
    sub->add_option("--params", params,
                    "family parameters as k=v pairs, comma separated; integer lists "
                    "use ':' (example: T=8,delays=0:1:3)");
  }

  ia::channel::ChannelFamily make() const { return ia::io::make_family(name, parse_params(params)); }
};

int run_blocks(const FamilyArgs& fam, const std::string& dump) {
  ia::channel::BuildingBlocks bb = ia::channel::build_blocks(fam.make());
  int div = ia::channel::diversity_order(bb);
  bool psi = ia::channel::has_full_rank_combination(bb, 64, 0x1afea5);
  std::cout << "family: " << ia::channel::family_name(bb.family.kind) << "\n"
            << "block_shape: " << bb.nr() << " x " << bb.nt() << "\n"
            << "block_count: " << bb.count() << "\n"
            << "diversity_order: " << div << "\n"
            << "psi_full_rank: " << (psi ? "true" : "false") << "\n";
  if (!dump.empty()) {
    ia::io::write_blocks_json(dump, bb);
    std::cout << "wrote " << dump << "\n";
  }
  return 0;
}

int run_solve(const FamilyArgs& fam, int K, std::uint64_t seed, const ia::solver::SolverConfig& cfg,
              const std::string& out, const std::string& out_instance) {
  ia::channel::BuildingBlocks bb = ia::channel::build_blocks(fam.make());
  // Same split as sweep trials: --seed <trial seed> reruns a recorded trial.
  ia::channel::ChannelInstance inst =
      ia::channel::sample_instance(bb, K, ia::split_seed(seed, 0));
  ia::solver::SolverConfig scfg = cfg;
  scfg.seed = ia::split_seed(seed, 1);
  auto [beams, rep] = ia::solver::solve(inst, scfg);
  std::cout << "verdict: " << verdict_name(rep.verdict) << "\n"
            << "best_leakage: " << num(rep.best_leakage) << "\n"
            << "direct_margin: " << num(rep.direct_margin) << "\n"
            << "iters_used: " << rep.iters_used << "\n"
            << "restart_index: " << rep.restart_index << "\n"
            << "wall_ms: " << num(rep.wall_ms) << "\n";
  if (!out_instance.empty()) {
    ia::io::write_instance_json(out_instance, inst);
    std::cout << "wrote " << out_instance << "\n";
  }
  if (!out.empty()) {
    ia::io::write_beams_json(out, inst, beams, rep);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int run_supports(const FamilyArgs& fam, int K, const std::string& pattern_path, bool enumerate,
                 std::uint64_t budget) {
  ia::channel::ChannelFamily family = fam.make();
  auto f_upper = ia::supports::default_f_upper(family.Mr, family.Mt);

  if (enumerate) {
    std::uint64_t ruled = 0, audit_failed = 0, survivors = 0;
    std::uint64_t visited = ia::supports::enumerate_block_patterns(
        family, K, budget,
        [&](const ia::supports::BlockSupportPattern& p, const ia::supports::CountReport& r) {
          bool audit = ia::supports::induction_audit(p, f_upper);
          ordered_json j;
          j["Rb"] = p.Rb;
          j["Sb"] = p.Sb;
          ordered_json rep = count_report_json(r, audit);
          for (auto& [key, val] : rep.items()) j[key] = val;
          std::cout << j.dump() << "\n";
          if (r.ruled_out) ++ruled;
          if (!audit) ++audit_failed;
          if (!r.ruled_out && audit) ++survivors;
        });
    ordered_json tail;
    tail["patterns"] = visited;
    tail["ruled_out"] = ruled;
    tail["audit_failed"] = audit_failed;
    tail["survivors"] = survivors;
    std::cout << tail.dump() << "\n";
    return 0;
  }

  if (!pattern_path.empty()) {
    ia::io::PatternFile pf = ia::io::read_pattern_json(pattern_path, family, K);
    if (pf.entry) {
      ia::supports::CountReport r = ia::supports::counting_verdict(*pf.entry);
      std::optional<bool> audit;
      if (pf.entry->nr == pf.entry->nt) audit = ia::supports::induction_audit(*pf.entry, f_upper);
      std::cout << count_report_json(r, audit).dump(2) << "\n";
    } else {
      ia::supports::CountReport r = ia::supports::counting_verdict(*pf.block);
      bool audit = ia::supports::induction_audit(*pf.block, f_upper);
      std::cout << count_report_json(r, audit).dump(2) << "\n";
    }
    return 0;
  }

  // No pattern given: report on the everything-in-support block pattern.
  std::vector<int> all_slots(family.T);
  for (int t = 0; t < family.T; ++t) all_slots[t] = t;
  ia::supports::BlockSupportPattern full = ia::supports::BlockSupportPattern::from_sets(
      K, family.T, family.Mr, family.Mt, std::vector<std::vector<int>>(K, all_slots),
      std::vector<std::vector<int>>(K, all_slots));
  ia::supports::CountReport r = ia::supports::counting_verdict(full);
  bool audit = ia::supports::induction_audit(full, f_upper);
  std::cout << count_report_json(r, audit).dump(2) << "\n";
  return 0;
}

int run_lifted_check(const std::string& instance_path, const std::string& beams_path, double tol) {
  ia::channel::ChannelInstance inst = ia::io::read_instance_json(instance_path);
  ia::solver::BeamformerSet beams = ia::io::read_beams_json(beams_path);
  int K = inst.K;
  if (static_cast<int>(beams.v.size()) != K || static_cast<int>(beams.u.size()) != K)
    throw ia::ConfigError("beams file has " + std::to_string(beams.v.size()) + " users, instance has " +
                          std::to_string(K));
  for (int k = 0; k < K; ++k)
    if (static_cast<int>(beams.v[k].size()) != inst.nt() ||
        static_cast<int>(beams.u[k].size()) != inst.nr())
      throw ia::ConfigError("beam dimensions do not match the instance");

  ia::lifted::LiftedInstance lifted = ia::lifted::make_lifted(inst, beams.v);
  std::vector<char> lifted_ok = ia::lifted::check_lifted_per_user(lifted, tol);
  bool have_original = inst.nt() <= inst.nr();
  std::vector<char> original_ok;
  if (have_original) original_ok = ia::lifted::check_original_per_user(inst, beams.v, tol);

  bool all_lifted = true, all_original = true;
  ordered_json per = ordered_json::array();
  for (int k = 0; k < K; ++k) {
    ordered_json e;
    e["k"] = k;
    e["lifted_ok"] = static_cast<bool>(lifted_ok[k]);
    if (have_original)
      e["original_ok"] = static_cast<bool>(original_ok[k]);
    else
      e["original_ok"] = nullptr;
    per.push_back(e);
    all_lifted = all_lifted && lifted_ok[k];
    if (have_original) all_original = all_original && original_ok[k];
  }

  ordered_json j;
  j["K"] = K;
  j["N"] = lifted.N;
  j["L"] = lifted.L;
  j["lifted_ok"] = all_lifted;
  if (have_original) {
    j["original_ok"] = all_original;
    std::string imp;
    if (all_original && all_lifted)
      imp = "both_hold";
    else if (all_lifted)
      imp = "lifted_only";
    else if (all_original)
      imp = "violation";
    else
      imp = "neither_holds";
    j["implication"] = imp;
  } else {
    j["original_ok"] = nullptr;
    j["implication"] = nullptr;
  }
  j["per_user"] = per;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_bounds(const FamilyArgs& fam, std::optional<int> K, bool as_json) {
  ia::bounds::BoundReport rep = ia::bounds::bound_report(fam.make(), K);
  if (as_json) {
    ordered_json j;
    j["N"] = rep.N;
    j["L"] = rep.L;
    j["T"] = rep.T;
    j["upper_K"] = rep.upper_K;
    j["achievable_K"] = rep.achievable_K;
    j["dof_upper"] = rep.dof_upper;
    j["dof_lower"] = rep.dof_lower;
    j["formula_tags"] = rep.formula_tags;
    j["ext_upper_tightens_at_t2"] = rep.ext_upper_tightens_at_t2;
    if (rep.K) {
      j["K"] = *rep.K;
      j["K_within_upper"] = rep.K_within_upper;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  auto row = [](const std::string& key, const std::string& val) {
    std::cout << "  " << key;
    for (size_t i = key.size(); i < 26; ++i) std::cout << ' ';
    std::cout << val << "\n";
  };
  std::cout << "bounds (single-beam users)\n";
  row("N (signal dimension)", std::to_string(rep.N));
  row("L (diversity order)", std::to_string(rep.L));
  row("T (extensions)", std::to_string(rep.T));
  row("upper_K", std::to_string(rep.upper_K));
  row("achievable_K", std::to_string(rep.achievable_K));
  row("dof_upper", num(rep.dof_upper));
  row("dof_lower", num(rep.dof_lower));
  std::string tags;
  for (const std::string& t : rep.formula_tags) tags += (tags.empty() ? "" : ", ") + t;
  row("formulas", tags.empty() ? "-" : tags);
  if (rep.ext_upper_tightens_at_t2)
    row("note", "generic-ext cap can tighten by 1 when T >= 2 (not folded in)");
  if (rep.K) {
    row("K (queried)", std::to_string(*rep.K));
    row("K_within_upper", rep.K_within_upper ? "true" : "false");
  }
  return 0;
}

int run_sweep_cmd(const std::string& config_path, bool resume, int jobs) {
  ia::sweep::SweepConfig cfg = ia::sweep::parse_config_file(config_path);
  cfg.resume = resume;
  cfg.jobs = jobs;
  ia::sweep::SweepSummary s = ia::sweep::run_sweep(cfg);
  for (const ia::sweep::KSummary& k : s.per_K)
    std::cout << "K=" << k.K << "  feasible " << k.feasible << "/" << k.trials << "  ("
              << num(k.feasible_fraction) << ")\n";
  std::cout << "empirical_K_star: " << s.empirical_K_star << "\n"
            << "upper_K: " << s.bound_overlay.upper_K << "\n"
            << "outputs: " << (cfg.out_dir / "trials.jsonl").string() << ", summary.{json,csv,svg}\n";
  if (!s.k_star_within_upper)
    std::cout << "warning: empirical K* exceeds the theoretical cap; inspect the trials\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interference alignment feasibility toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  FamilyArgs blocks_fam;
  std::string blocks_dump;
  CLI::App* blocks = app.add_subcommand("blocks", "build a family's basis blocks and probe them");
  blocks_fam.attach(blocks);
  blocks->add_option("--dump", blocks_dump, "write blocks to this JSON file");
  blocks->callback([&] { rc = run_blocks(blocks_fam, blocks_dump); });

  FamilyArgs solve_fam;
  int solve_K = 0;
  std::uint64_t solve_seed = 0;
  ia::solver::SolverConfig solve_cfg;
  std::string solve_out, solve_out_instance;
  CLI::App* solve = app.add_subcommand("solve", "sample an instance and run the IA solver");
  solve_fam.attach(solve);
  solve->add_option("--K", solve_K, "number of users")->required()->check(CLI::PositiveNumber);
  solve->add_option("--seed", solve_seed, "master seed (instance and solver streams derive from it)");
  solve->add_option("--restarts", solve_cfg.restarts, "solver restarts");
  solve->add_option("--max-iters", solve_cfg.max_iters, "iteration cap per restart");
  solve->add_option("--tol-leakage", solve_cfg.tol_leakage, "leakage pass threshold");
  solve->add_option("--tol-margin", solve_cfg.tol_margin, "direct-link margin threshold");
  solve->add_option("--out", solve_out, "write beams + report to this JSON file");
  solve->add_option("--out-instance", solve_out_instance, "write the sampled instance to this JSON file");
  solve->callback(
      [&] { rc = run_solve(solve_fam, solve_K, solve_seed, solve_cfg, solve_out, solve_out_instance); });

  FamilyArgs sup_fam;
  int sup_K = 0;
  std::string sup_pattern;
  bool sup_enum = false;
  std::uint64_t sup_budget = 10000000;
  CLI::App* sup = app.add_subcommand("supports", "support-pattern counting and audits");
  sup_fam.attach(sup);
  sup->add_option("--K", sup_K, "number of users")->required()->check(CLI::PositiveNumber);
  sup->add_option("--pattern", sup_pattern, "JSON pattern file with R/S (entries) or Rb/Sb (slots)");
  sup->add_flag("--enumerate", sup_enum, "enumerate every block pattern, one JSON record per line");
  sup->add_option("--budget", sup_budget, "enumeration budget (pattern count cap)");
  sup->callback([&] { rc = run_supports(sup_fam, sup_K, sup_pattern, sup_enum, sup_budget); });

  std::string lc_instance, lc_beams;
  double lc_tol = 1e-8;
  CLI::App* lc = app.add_subcommand("lifted-check", "lifted vs original alignment conditions");
  lc->add_option("--instance", lc_instance, "instance JSON (see solve --out-instance)")->required();
  lc->add_option("--beams", lc_beams, "beams JSON (see solve --out)")->required();
  lc->add_option("--tol", lc_tol, "rank tolerance");
  lc->callback([&] { rc = run_lifted_check(lc_instance, lc_beams, lc_tol); });

  FamilyArgs bounds_fam;
  int bounds_K = -1;
  bool bounds_json = false;
  CLI::App* bnd = app.add_subcommand("bounds", "closed-form user-count and DoF bounds");
  bounds_fam.attach(bnd);
  bnd->add_option("--K", bounds_K, "also check this user count against the cap");
  bnd->add_flag("--json", bounds_json, "machine-readable output");
  bnd->callback([&] {
    std::optional<int> K;
    if (bounds_K >= 0) K = bounds_K;
    rc = run_bounds(bounds_fam, K, bounds_json);
  });

  std::string sweep_config;
  bool sweep_resume = false;
  int sweep_jobs = 1;
  CLI::App* swp = app.add_subcommand("sweep", "Monte Carlo feasibility sweep over K");
  swp->add_option("--config", sweep_config, "key=value config file")->required();
  swp->add_flag("--resume", sweep_resume, "continue an interrupted sweep");
  swp->add_option("--jobs", sweep_jobs, "worker threads per K batch");
  swp->callback([&] { rc = run_sweep_cmd(sweep_config, sweep_resume, sweep_jobs); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ia::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ia::InvalidFamilyParams& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ia::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
