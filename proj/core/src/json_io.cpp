#include "ia/json_io.hpp"

#include <fstream>

#include "json.hpp"

#include "ia/errors.hpp"

namespace ia::io {

using nlohmann::ordered_json;

namespace {

ordered_json complex_to_json(lin::cplx z) { return ordered_json::array({z.real(), z.imag()}); }

lin::cplx complex_from_json(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json matrix_to_json(const lin::Matrix& m) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) arr.push_back(complex_to_json(m(i, j)));
  return arr;
}

lin::Matrix matrix_from_json(const ordered_json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw ConfigError("block has wrong entry count");
  lin::Matrix m(rows, cols);
  int at = 0;
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[at++]);
  return m;
}

ordered_json family_to_json(const channel::ChannelFamily& fam) {
  ordered_json j;
  j["name"] = channel::family_name(fam.kind);
  j["Mt"] = fam.Mt;
  j["Mr"] = fam.Mr;
  j["T"] = fam.T;
  if (!fam.delays.empty()) j["delays"] = fam.delays;
  if (!fam.block_lengths.empty()) j["block_lengths"] = fam.block_lengths;
  if (fam.kind == channel::FamilyKind::Custom) {
    j["nr"] = fam.nr();
    j["nt"] = fam.nt();
    ordered_json blocks = ordered_json::array();
    for (const lin::Matrix& b : fam.custom_blocks) blocks.push_back(matrix_to_json(b));
    j["blocks"] = blocks;
  }
  return j;
}

channel::ChannelFamily family_from_json(const ordered_json& j) {
  std::string name = j.at("name").get<std::string>();
  using channel::ChannelFamily;
  if (name == "siso_generic_ext") return ChannelFamily::siso_generic_ext(j.at("T").get<int>());
  if (name == "siso_l_tap")
    return ChannelFamily::siso_l_tap(j.at("T").get<int>(),
                                     j.at("delays").get<std::vector<int>>());
  if (name == "siso_block_fading")
    return ChannelFamily::siso_block_fading(j.at("block_lengths").get<std::vector<int>>());
  if (name == "mimo_constant")
    return ChannelFamily::mimo_constant(j.at("Mt").get<int>(), j.at("Mr").get<int>());
  if (name == "mimo_constant_ext")
    return ChannelFamily::mimo_constant_ext(j.at("Mt").get<int>(), j.at("Mr").get<int>(),
                                            j.at("T").get<int>());
  if (name == "mimo_generic_ext")
    return ChannelFamily::mimo_generic_ext(j.at("Mt").get<int>(), j.at("Mr").get<int>(),
                                           j.at("T").get<int>());
  if (name == "acs_constant") return ChannelFamily::acs_constant(j.at("T").get<int>());
  if (name == "custom") {
    int nr = j.at("nr").get<int>();
    int nt = j.at("nt").get<int>();
    std::vector<lin::Matrix> blocks;
    for (const ordered_json& b : j.at("blocks")) blocks.push_back(matrix_from_json(b, nr, nt));
    return ChannelFamily::custom(std::move(blocks));
  }
  throw ConfigError("unknown family name: " + name);
}

ordered_json beam_to_json(const lin::Vector& v) {
  ordered_json arr = ordered_json::array();
  for (lin::cplx z : v) arr.push_back(complex_to_json(z));
  return arr;
}

lin::Vector beam_from_json(const ordered_json& j) {
  lin::Vector v;
  for (const ordered_json& z : j) v.push_back(complex_from_json(z));
  return v;
}

ordered_json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

void store_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed on " + path.string());
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string token;
  for (char c : text + ":") {
    if (c == ':' || c == ',') {
      if (!token.empty()) {
        try {
          out.push_back(std::stoi(token));
        } catch (const std::exception&) {
          throw ConfigError("bad integer in list: " + token);
        }
        token.clear();
      }
    } else {
      token += c;
    }
  }
  return out;
}

int require_int(const std::map<std::string, std::string>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing family parameter: " + key);
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("bad integer for parameter " + key + ": " + it->second);
  }
}

}  // namespace

channel::ChannelFamily make_family(const std::string& name,
                                   const std::map<std::string, std::string>& params) {
  using channel::ChannelFamily;
  auto check_known = [&](std::initializer_list<const char*> known) {
    for (const auto& [key, value] : params) {
      bool ok = false;
      for (const char* k : known)
        if (key == k) ok = true;
      if (!ok) throw ConfigError("unknown parameter '" + key + "' for family " + name);
    }
  };

  try {
    if (name == "siso_generic_ext") {
      check_known({"T"});
      return ChannelFamily::siso_generic_ext(require_int(params, "T"));
    }
    if (name == "siso_l_tap") {
      check_known({"T", "N", "delays"});
      auto it = params.find("delays");
      if (it == params.end()) throw ConfigError("missing family parameter: delays");
      int n = params.count("N") ? require_int(params, "N") : require_int(params, "T");
      return ChannelFamily::siso_l_tap(n, parse_int_list(it->second));
    }
    if (name == "siso_block_fading") {
      check_known({"block_lengths"});
      auto it = params.find("block_lengths");
      if (it == params.end()) throw ConfigError("missing family parameter: block_lengths");
      return ChannelFamily::siso_block_fading(parse_int_list(it->second));
    }
    if (name == "mimo_constant") {
      check_known({"Mt", "Mr"});
      return ChannelFamily::mimo_constant(require_int(params, "Mt"), require_int(params, "Mr"));
    }
    if (name == "mimo_constant_ext") {
      check_known({"Mt", "Mr", "T"});
      return ChannelFamily::mimo_constant_ext(require_int(params, "Mt"),
                                              require_int(params, "Mr"), require_int(params, "T"));
    }
    if (name == "mimo_generic_ext") {
      check_known({"Mt", "Mr", "T"});
      return ChannelFamily::mimo_generic_ext(require_int(params, "Mt"), require_int(params, "Mr"),
                                             require_int(params, "T"));
    }
    if (name == "acs_constant") {
      check_known({"T"});
      return ChannelFamily::acs_constant(require_int(params, "T"));
    }
  } catch (const InvalidFamilyParams& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown family name: " + name);
}

void write_blocks_json(const std::filesystem::path& path, const channel::BuildingBlocks& blocks) {
  // Bare array, one flat row-major block per element; the shape metadata
  // lives with whoever asked for the dump.
  ordered_json arr = ordered_json::array();
  for (const lin::Matrix& b : blocks.blocks) arr.push_back(matrix_to_json(b));
  store_json(path, arr);
}

void write_instance_json(const std::filesystem::path& path, const channel::ChannelInstance& inst) {
  ordered_json j;
  j["family"] = family_to_json(inst.blocks.family);
  j["K"] = inst.K;
  j["seed"] = inst.seed;
  j["nr"] = inst.nr();
  j["nt"] = inst.nt();
  j["L"] = inst.L();
  ordered_json tau = ordered_json::array();
  for (int k = 0; k < inst.K; ++k) {
    ordered_json row = ordered_json::array();
    for (int jj = 0; jj < inst.K; ++jj) {
      ordered_json link = ordered_json::array();
      for (lin::cplx t : inst.tau[k][jj]) link.push_back(complex_to_json(t));
      row.push_back(link);
    }
    tau.push_back(row);
  }
  j["tau"] = tau;
  store_json(path, j);
}

channel::ChannelInstance read_instance_json(const std::filesystem::path& path) {
  ordered_json j = load_json(path);
  try {
    channel::ChannelFamily fam = family_from_json(j.at("family"));
    channel::BuildingBlocks blocks = channel::build_blocks(fam);
    int K = j.at("K").get<int>();
    if (K < 1) throw ConfigError("instance K must be >= 1");

    channel::ChannelInstance inst;
    inst.blocks = blocks;
    inst.K = K;
    inst.seed = j.value("seed", 0ull);
    const ordered_json& tau = j.at("tau");
    if (static_cast<int>(tau.size()) != K) throw ConfigError("tau must be K x K x L");
    inst.tau.assign(K, {});
    inst.H.assign(K, std::vector<lin::Matrix>(K));
    for (int k = 0; k < K; ++k) {
      if (static_cast<int>(tau[k].size()) != K) throw ConfigError("tau must be K x K x L");
      inst.tau[k].resize(K);
      for (int jj = 0; jj < K; ++jj) {
        std::vector<lin::cplx> link;
        for (const ordered_json& z : tau[k][jj]) link.push_back(complex_from_json(z));
        if (static_cast<int>(link.size()) != blocks.count())
          throw ConfigError("tau entries must have length L");
        inst.H[k][jj] = channel::assemble(blocks, link);
        inst.tau[k][jj] = std::move(link);
      }
    }
    return inst;
  } catch (const ordered_json::exception& e) {
    throw ConfigError("instance file " + path.string() + ": " + e.what());
  }
}

void write_beams_json(const std::filesystem::path& path, const channel::ChannelInstance& inst,
                      const solver::BeamformerSet& beams, const solver::FeasibilityReport& report) {
  ordered_json j;
  j["family"] = family_to_json(inst.blocks.family);
  j["K"] = inst.K;
  j["seed"] = inst.seed;
  ordered_json rep;
  rep["verdict"] = report.verdict == solver::Verdict::Feasible ? "Feasible" : "Undetermined";
  rep["best_leakage"] = report.best_leakage;
  rep["direct_margin"] = report.direct_margin;
  rep["iters_used"] = report.iters_used;
  rep["restart_index"] = report.restart_index;
  rep["wall_ms"] = report.wall_ms;
  j["report"] = rep;
  ordered_json u = ordered_json::array(), v = ordered_json::array();
  for (const lin::Vector& b : beams.u) u.push_back(beam_to_json(b));
  for (const lin::Vector& b : beams.v) v.push_back(beam_to_json(b));
  j["u"] = u;
  j["v"] = v;
  store_json(path, j);
}

solver::BeamformerSet read_beams_json(const std::filesystem::path& path) {
  ordered_json j = load_json(path);
  try {
    solver::BeamformerSet beams;
    for (const ordered_json& b : j.at("u")) beams.u.push_back(beam_from_json(b));
    for (const ordered_json& b : j.at("v")) beams.v.push_back(beam_from_json(b));
    if (beams.u.size() != beams.v.size()) throw ConfigError("beams file: u/v count mismatch");
    return beams;
  } catch (const ordered_json::exception& e) {
    throw ConfigError("beams file " + path.string() + ": " + e.what());
  }
}

PatternFile read_pattern_json(const std::filesystem::path& path,
                              const channel::ChannelFamily& family, int K) {
  ordered_json j = load_json(path);
  PatternFile out;
  try {
    if (j.contains("R") || j.contains("S")) {
      auto R = j.at("R").get<std::vector<std::vector<int>>>();
      auto S = j.at("S").get<std::vector<std::vector<int>>>();
      out.entry =
          supports::SupportPattern::from_sets(K, family.nr(), family.nt(), std::move(R), std::move(S));
    } else if (j.contains("Rb") || j.contains("Sb")) {
      auto Rb = j.at("Rb").get<std::vector<std::vector<int>>>();
      auto Sb = j.at("Sb").get<std::vector<std::vector<int>>>();
      out.block = supports::BlockSupportPattern::from_sets(K, family.T, family.Mr, family.Mt,
                                                           std::move(Rb), std::move(Sb));
    } else {
      throw ConfigError("pattern file needs R/S or Rb/Sb");
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError("pattern file " + path.string() + ": " + e.what());
  } catch (const DimensionMismatch& e) {
    throw ConfigError("pattern file " + path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace ia::io
