#include "ia/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <climits>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ia/errors.hpp"
#include "ia/json_io.hpp"
#include "ia/rng.hpp"

namespace ia::sweep {

using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int to_int(const std::string& key, const std::string& val) {
  try {
    size_t pos = 0;
    long long v = std::stoll(val, &pos);
    if (pos != val.size() || v < INT_MIN || v > INT_MAX) throw std::invalid_argument(val);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": " + val);
  }
}

double to_double(const std::string& key, const std::string& val) {
  try {
    size_t pos = 0;
    double v = std::stod(val, &pos);
    if (pos != val.size()) throw std::invalid_argument(val);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": " + val);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& val) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(val, &pos);
    if (pos != val.size()) throw std::invalid_argument(val);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad seed for " + key + ": " + val);
  }
}

std::string verdict_name(solver::Verdict v) {
  return v == solver::Verdict::Feasible ? "Feasible" : "Undetermined";
}

std::string record_line(const TrialRecord& r) {
  ordered_json j;
  j["family"] = r.family;
  j["Mt"] = r.Mt;
  j["Mr"] = r.Mr;
  j["T"] = r.T;
  j["L"] = r.L;
  j["K"] = r.K;
  j["trial_index"] = r.trial_index;
  j["seed"] = r.seed;
  j["verdict"] = verdict_name(r.verdict);
  j["leakage"] = r.leakage;
  j["margin"] = r.margin;
  j["iters"] = r.iters;
  j["restarts_used"] = r.restarts_used;
  j["wall_ms"] = r.wall_ms;
  return j.dump();
}

TrialRecord record_from_line(const std::string& line) {
  ordered_json j = ordered_json::parse(line);
  TrialRecord r;
  r.family = j.at("family").get<std::string>();
  r.Mt = j.at("Mt").get<int>();
  r.Mr = j.at("Mr").get<int>();
  r.T = j.at("T").get<int>();
  r.L = j.at("L").get<int>();
  r.K = j.at("K").get<int>();
  r.trial_index = j.at("trial_index").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  std::string v = j.at("verdict").get<std::string>();
  if (v != "Feasible" && v != "Undetermined") throw ConfigError("bad verdict: " + v);
  r.verdict = v == "Feasible" ? solver::Verdict::Feasible : solver::Verdict::Undetermined;
  r.leakage = j.at("leakage").get<double>();
  r.margin = j.at("margin").get<double>();
  r.iters = j.at("iters").get<int>();
  r.restarts_used = j.at("restarts_used").get<int>();
  r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

std::string fixed2(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string family_label(const channel::ChannelFamily& f) {
  std::string s = channel::family_name(f.kind);
  s += " Mt=" + std::to_string(f.Mt) + " Mr=" + std::to_string(f.Mr) +
       " T=" + std::to_string(f.T) + " L=" + std::to_string(f.L());
  return s;
}

ordered_json family_summary_json(const channel::ChannelFamily& f) {
  ordered_json j;
  j["name"] = channel::family_name(f.kind);
  j["Mt"] = f.Mt;
  j["Mr"] = f.Mr;
  j["T"] = f.T;
  if (!f.delays.empty()) j["delays"] = f.delays;
  if (!f.block_lengths.empty()) j["block_lengths"] = f.block_lengths;
  j["nr"] = f.nr();
  j["nt"] = f.nt();
  j["L"] = f.L();
  return j;
}

void validate_config(const SweepConfig& cfg) {
  if (cfg.K_min < 1) throw ConfigError("K_min must be >= 1");
  if (cfg.K_min > cfg.K_max) throw ConfigError("K_min must be <= K_max");
  if (cfg.trials_per_K < 1) throw ConfigError("trials must be >= 1");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
  if (cfg.solver.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (cfg.solver.restarts < 1) throw ConfigError("restarts must be >= 1");
  if (!(cfg.solver.tol_leakage > 0)) throw ConfigError("tol_leakage must be > 0");
  if (!(cfg.solver.tol_margin > 0)) throw ConfigError("tol_margin must be > 0");
}

TrialRecord run_trial(const SweepConfig& cfg, const channel::BuildingBlocks& blocks, int K,
                      int trial) {
  TrialRecord r;
  r.family = channel::family_name(cfg.family.kind);
  r.Mt = cfg.family.Mt;
  r.Mr = cfg.family.Mr;
  r.T = cfg.family.T;
  r.L = blocks.count();
  r.K = K;
  r.trial_index = trial;
  r.seed = split_seed(cfg.master_seed, static_cast<std::uint64_t>(K),
                      static_cast<std::uint64_t>(trial));

  channel::ChannelInstance inst = channel::sample_instance(blocks, K, split_seed(r.seed, 0));
  solver::SolverConfig scfg = cfg.solver;
  scfg.seed = split_seed(r.seed, 1);
  auto [beams, rep] = solver::solve(inst, scfg);
  (void)beams;
  r.verdict = rep.verdict;
  r.leakage = rep.best_leakage;
  r.margin = rep.direct_margin;
  r.iters = rep.iters_used;
  r.restarts_used =
      rep.verdict == solver::Verdict::Feasible ? rep.restart_index + 1 : cfg.solver.restarts;
  r.wall_ms = rep.wall_ms;
  return r;
}

/// Scans an existing trials.jsonl. Complete lines must parse and match the
/// config exactly (family, ranges, derived seed); a torn tail (no newline or
/// unparseable) marks where the file gets truncated before appending resumes.
struct LoadedTrials {
  std::vector<TrialRecord> records;
  std::uintmax_t keep_bytes = 0;
};

LoadedTrials load_existing(const std::filesystem::path& path, const SweepConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  LoadedTrials out;
  std::set<std::pair<int, int>> seen;
  std::string expect_family = channel::family_name(cfg.family.kind);
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail, no newline
    std::string line = text.substr(pos, nl - pos);
    TrialRecord r;
    try {
      r = record_from_line(line);
    } catch (const std::exception&) {
      break;  // torn tail, drop from here on
    }
    if (r.family != expect_family || r.Mt != cfg.family.Mt || r.Mr != cfg.family.Mr ||
        r.T != cfg.family.T || r.L != cfg.family.L() || r.K < cfg.K_min ||
        r.K > cfg.K_max || r.trial_index < 0 || r.trial_index >= cfg.trials_per_K ||
        r.seed != split_seed(cfg.master_seed, static_cast<std::uint64_t>(r.K),
                             static_cast<std::uint64_t>(r.trial_index)) ||
        !seen.insert({r.K, r.trial_index}).second)
      throw ConfigError("existing " + path.string() + " does not match this sweep config");
    out.records.push_back(std::move(r));
    pos = nl + 1;
  }
  out.keep_bytes = pos;
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed on " + path.string());
}

std::string render_summary_json(const SweepSummary& s) {
  ordered_json j;
  j["family"] = family_summary_json(s.family);
  j["K_min"] = s.K_min;
  j["K_max"] = s.K_max;
  j["trials_per_K"] = s.trials_per_K;
  ordered_json per = ordered_json::array();
  for (const KSummary& k : s.per_K) {
    ordered_json e;
    e["K"] = k.K;
    e["trials"] = k.trials;
    e["feasible"] = k.feasible;
    e["feasible_fraction"] = k.feasible_fraction;
    per.push_back(e);
  }
  j["per_K"] = per;
  j["empirical_K_star"] = s.empirical_K_star;
  j["k_star_within_upper"] = s.k_star_within_upper;
  ordered_json b;
  b["N"] = s.bound_overlay.N;
  b["L"] = s.bound_overlay.L;
  b["T"] = s.bound_overlay.T;
  b["upper_K"] = s.bound_overlay.upper_K;
  b["achievable_K"] = s.bound_overlay.achievable_K;
  b["dof_upper"] = s.bound_overlay.dof_upper;
  b["dof_lower"] = s.bound_overlay.dof_lower;
  b["formula_tags"] = s.bound_overlay.formula_tags;
  b["ext_upper_tightens_at_t2"] = s.bound_overlay.ext_upper_tightens_at_t2;
  j["bounds"] = b;
  return j.dump(2) + "\n";
}

std::string render_summary_csv(const SweepSummary& s) {
  std::string out = "family,Mt,Mr,T,L,K,trials,feasible_fraction\n";
  std::string fam = channel::family_name(s.family.kind);
  for (const KSummary& k : s.per_K) {
    out += fam + ',' + std::to_string(s.family.Mt) + ',' + std::to_string(s.family.Mr) + ',' +
           std::to_string(s.family.T) + ',' + std::to_string(s.family.L()) + ',' +
           std::to_string(k.K) + ',' + std::to_string(k.trials) + ',' +
           shortest(k.feasible_fraction) + '\n';
  }
  return out;
}

}  // namespace

SweepConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  static const std::set<std::string> known = {
      "family",    "Mt",      "Mr",          "T",          "L",
      "delays",    "block_lengths", "K_min", "K_max",      "trials",
      "max_iters", "restarts", "tol_leakage", "tol_margin", "seed",
      "out_dir"};
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || !known.count(key))
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key +
                        "'");
    kv[key] = val;
  }

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing config key: " + key);
    return it->second;
  };

  SweepConfig cfg;
  std::map<std::string, std::string> fparams;
  for (const char* k : {"Mt", "Mr", "T", "delays", "block_lengths"})
    if (kv.count(k)) fparams[k] = kv.at(k);
  std::string fname = require("family");
  if (fname == "siso_l_tap" && kv.count("L") && !kv.count("delays")) {
    int taps = to_int("L", kv.at("L"));
    if (taps < 1) throw ConfigError("L must be >= 1");
    std::string delays;
    for (int l = 0; l < taps; ++l) delays += (l ? "," : "") + std::to_string(l);
    fparams["delays"] = delays;
  }
  cfg.family = io::make_family(fname, fparams);
  if (kv.count("L") && fname != "siso_l_tap") {
    int given = to_int("L", kv.at("L"));
    if (given != cfg.family.L())
      throw ConfigError("L=" + kv.at("L") + " inconsistent with family (derived L=" +
                        std::to_string(cfg.family.L()) + ")");
  }

  cfg.K_min = to_int("K_min", require("K_min"));
  cfg.K_max = to_int("K_max", require("K_max"));
  cfg.trials_per_K = to_int("trials", require("trials"));
  if (kv.count("max_iters")) cfg.solver.max_iters = to_int("max_iters", kv.at("max_iters"));
  if (kv.count("restarts")) cfg.solver.restarts = to_int("restarts", kv.at("restarts"));
  if (kv.count("tol_leakage")) cfg.solver.tol_leakage = to_double("tol_leakage", kv.at("tol_leakage"));
  if (kv.count("tol_margin")) cfg.solver.tol_margin = to_double("tol_margin", kv.at("tol_margin"));
  if (kv.count("seed")) cfg.master_seed = to_u64("seed", kv.at("seed"));
  cfg.out_dir = require("out_dir");
  validate_config(cfg);
  return cfg;
}

SweepSummary run_sweep(const SweepConfig& cfg) {
  validate_config(cfg);
  channel::BuildingBlocks blocks = channel::build_blocks(cfg.family);

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.out_dir.string() + ": " + ec.message());
  std::filesystem::path trials_path = cfg.out_dir / "trials.jsonl";

  std::vector<TrialRecord> all;
  std::set<std::pair<int, int>> done;
  if (cfg.resume && std::filesystem::exists(trials_path)) {
    LoadedTrials loaded = load_existing(trials_path, cfg);
    std::filesystem::resize_file(trials_path, loaded.keep_bytes, ec);
    if (ec) throw IoError("cannot truncate " + trials_path.string() + ": " + ec.message());
    for (TrialRecord& r : loaded.records) {
      done.insert({r.K, r.trial_index});
      all.push_back(std::move(r));
    }
  } else if (std::filesystem::exists(trials_path)) {
    std::filesystem::remove(trials_path, ec);
    if (ec) throw IoError("cannot remove " + trials_path.string() + ": " + ec.message());
  }

  std::ofstream out(trials_path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open " + trials_path.string() + " for append");

  auto emit = [&](TrialRecord r) {
    out << record_line(r) << '\n' << std::flush;
    if (!out) throw IoError("write failed on " + trials_path.string());
    all.push_back(std::move(r));
  };

  for (int K = cfg.K_min; K <= cfg.K_max; ++K) {
    if (cfg.jobs == 1) {
      for (int t = 0; t < cfg.trials_per_K; ++t) {
        if (done.count({K, t})) continue;
        emit(run_trial(cfg, blocks, K, t));
      }
      continue;
    }

    // Workers push finished records under a mutex; this thread is the single
    // writer and drains them strictly in trial order.
    std::mutex mu;
    std::condition_variable cv;
    std::map<int, TrialRecord> ready;
    std::exception_ptr err;
    std::atomic<int> next{0};

    auto worker = [&] {
      for (;;) {
        int t = next.fetch_add(1);
        if (t >= cfg.trials_per_K) return;
        if (done.count({K, t})) continue;
        try {
          TrialRecord r = run_trial(cfg, blocks, K, t);
          std::lock_guard<std::mutex> g(mu);
          ready.emplace(t, std::move(r));
          cv.notify_all();
        } catch (...) {
          std::lock_guard<std::mutex> g(mu);
          if (!err) err = std::current_exception();
          cv.notify_all();
          return;
        }
      }
    };

    int workers = std::min(cfg.jobs, cfg.trials_per_K);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

    std::exception_ptr writer_err;
    for (int t = 0; t < cfg.trials_per_K; ++t) {
      if (done.count({K, t})) continue;
      TrialRecord r;
      {
        std::unique_lock<std::mutex> lk(mu);
        cv.wait(lk, [&] { return err || ready.count(t); });
        if (err) break;
        r = std::move(ready.at(t));
        ready.erase(t);
      }
      try {
        emit(std::move(r));
      } catch (...) {
        writer_err = std::current_exception();
        next.store(cfg.trials_per_K);  // stop handing out work
        break;
      }
    }
    for (std::thread& th : pool) th.join();
    if (writer_err) std::rethrow_exception(writer_err);
    if (err) std::rethrow_exception(err);
  }
  out.close();

  SweepSummary s;
  s.family = cfg.family;
  s.K_min = cfg.K_min;
  s.K_max = cfg.K_max;
  s.trials_per_K = cfg.trials_per_K;
  for (int K = cfg.K_min; K <= cfg.K_max; ++K) {
    KSummary k;
    k.K = K;
    for (const TrialRecord& r : all) {
      if (r.K != K) continue;
      ++k.trials;
      if (r.verdict == solver::Verdict::Feasible) ++k.feasible;
    }
    k.feasible_fraction = k.trials ? static_cast<double>(k.feasible) / k.trials : 0.0;
    if (k.feasible_fraction >= 0.5) s.empirical_K_star = K;
    s.per_K.push_back(k);
  }
  s.bound_overlay = bounds::bound_report(cfg.family);
  s.k_star_within_upper = s.empirical_K_star <= s.bound_overlay.upper_K;

  write_text_file(cfg.out_dir / "summary.json", render_summary_json(s));
  write_text_file(cfg.out_dir / "summary.csv", render_summary_csv(s));
  plot_summary(s, cfg.out_dir / "summary.svg");
  return s;
}

std::string render_summary_svg(const SweepSummary& s) {
  if (s.per_K.empty()) throw ConfigError("nothing to plot: summary has no per-K data");

  const double W = 640, H = 400;
  const double left = 52, right = 16, top = 34, bottom = 46;
  const double pw = W - left - right, ph = H - top - bottom;
  const int span = s.K_max - s.K_min + 1;
  auto x_of = [&](double k) { return left + (k - (s.K_min - 0.5)) / span * pw; };
  auto y_of = [&](double f) { return top + (1.0 - f) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"320\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">feasible fraction vs K  [" +
         family_label(s.family) + "]</text>\n";

  for (int i = 0; i <= 4; ++i) {
    double f = i * 0.25;
    std::string y = fixed2(y_of(f));
    svg += "<line x1=\"" + fixed2(left - 4) + "\" y1=\"" + y + "\" x2=\"" + fixed2(left) +
           "\" y2=\"" + y + "\" stroke=\"#222222\"/>\n";
    svg += "<text x=\"" + fixed2(left - 8) + "\" y=\"" + fixed2(y_of(f) + 4) +
           "\" text-anchor=\"end\">" + fixed2(f) + "</text>\n";
  }
  svg += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(y_of(0.5)) + "\" x2=\"" +
         fixed2(left + pw) + "\" y2=\"" + fixed2(y_of(0.5)) +
         "\" stroke=\"#bbbbbb\" stroke-dasharray=\"3 3\"/>\n";

  const double bw = 0.72 * pw / span;
  for (const KSummary& k : s.per_K) {
    double cx = x_of(k.K);
    double y = y_of(k.feasible_fraction);
    svg += "<rect x=\"" + fixed2(cx - bw / 2) + "\" y=\"" + fixed2(y) + "\" width=\"" +
           fixed2(bw) + "\" height=\"" + fixed2(y_of(0.0) - y) + "\" fill=\"#4878b0\"/>\n";
    svg += "<text x=\"" + fixed2(cx) + "\" y=\"" + fixed2(y_of(0.0) + 16) +
           "\" text-anchor=\"middle\">" + std::to_string(k.K) + "</text>\n";
  }

  struct Marker {
    double at;
    std::string label;
    std::string color;
  };
  std::vector<Marker> markers;
  markers.push_back({static_cast<double>(s.bound_overlay.upper_K),
                     "cap " + std::to_string(s.bound_overlay.upper_K), "#c0392b"});
  if (s.bound_overlay.achievable_K > 0)
    markers.push_back({static_cast<double>(s.bound_overlay.achievable_K),
                       "ach " + std::to_string(s.bound_overlay.achievable_K), "#2e8b57"});
  long long nl = static_cast<long long>(s.bound_overlay.N) * s.bound_overlay.L;
  markers.push_back({static_cast<double>(nl), "NL " + std::to_string(nl), "#e67e22"});
  int slot = 0;
  for (const Marker& m : markers) {
    if (m.at < s.K_min - 0.5 || m.at > s.K_max + 0.5) continue;
    std::string x = fixed2(x_of(m.at));
    svg += "<line x1=\"" + x + "\" y1=\"" + fixed2(top) + "\" x2=\"" + x + "\" y2=\"" +
           fixed2(top + ph) + "\" stroke=\"" + m.color + "\" stroke-dasharray=\"5 3\"/>\n";
    svg += "<text x=\"" + fixed2(x_of(m.at) + 4) + "\" y=\"" + fixed2(top + 12 + 13 * slot) +
           "\" fill=\"" + m.color + "\">" + m.label + "</text>\n";
    ++slot;
  }

  svg += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top) + "\" x2=\"" + fixed2(left) +
         "\" y2=\"" + fixed2(top + ph) + "\" stroke=\"#222222\"/>\n";
  svg += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top + ph) + "\" x2=\"" +
         fixed2(left + pw) + "\" y2=\"" + fixed2(top + ph) + "\" stroke=\"#222222\"/>\n";

  std::string footer = "K*=" + std::to_string(s.empirical_K_star) +
                       "  upper=" + std::to_string(s.bound_overlay.upper_K) +
                       "  achievable=" + std::to_string(s.bound_overlay.achievable_K) +
                       "  NL=" + std::to_string(nl) +
                       "  trials/K=" + std::to_string(s.trials_per_K);
  svg += "<text x=\"320\" y=\"392\" text-anchor=\"middle\" fill=\"#444444\">" + footer +
         "</text>\n";
  svg += "</svg>\n";
  return svg;
}

void plot_summary(const SweepSummary& summary, const std::filesystem::path& path) {
  write_text_file(path, render_summary_svg(summary));
}

}  // namespace ia::sweep
