#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "ia/channel.hpp"
#include "ia/errors.hpp"
#include "ia/json_io.hpp"
#include "ia/solver.hpp"
#include "nlohmann/json.hpp"

using namespace ia;
using namespace ia::channel;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  fs::path p = "io_test_tmp";
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("make_family builds every built-in from string parameters") {
  auto f1 = io::make_family("siso_generic_ext", {{"T", "3"}});
  CHECK(f1.kind == FamilyKind::SisoGenericExt);
  CHECK(f1.T == 3);

  auto f2 = io::make_family("siso_l_tap", {{"N", "4"}, {"delays", "0:1:3"}});
  CHECK(f2.kind == FamilyKind::SisoLTap);
  CHECK(f2.T == 4);
  CHECK(f2.delays == std::vector<int>{0, 1, 3});

  // Comma separators and the T alias for the tone count.
  auto f3 = io::make_family("siso_l_tap", {{"T", "4"}, {"delays", "0,2"}});
  CHECK(f3.delays == std::vector<int>{0, 2});

  auto f4 = io::make_family("siso_block_fading", {{"block_lengths", "2:1"}});
  CHECK(f4.block_lengths == std::vector<int>{2, 1});
  CHECK(f4.T == 3);

  auto f5 = io::make_family("mimo_constant", {{"Mt", "2"}, {"Mr", "3"}});
  CHECK(f5.Mt == 2);
  CHECK(f5.Mr == 3);

  auto f6 = io::make_family("mimo_constant_ext", {{"Mt", "1"}, {"Mr", "2"}, {"T", "2"}});
  CHECK(f6.kind == FamilyKind::MimoConstantExt);
  CHECK(f6.L() == 2);

  auto f7 = io::make_family("mimo_generic_ext", {{"Mt", "2"}, {"Mr", "2"}, {"T", "2"}});
  CHECK(f7.L() == 8);

  auto f8 = io::make_family("acs_constant", {{"T", "2"}});
  CHECK(f8.kind == FamilyKind::AcsConstant);
  CHECK(f8.nr() == 4);
}

TEST_CASE("make_family rejects unknown names, keys and bad values") {
  CHECK_THROWS_AS(io::make_family("nope", {}), ConfigError);
  CHECK_THROWS_AS(io::make_family("siso_generic_ext", {{"T", "3"}, {"Mt", "2"}}), ConfigError);
  CHECK_THROWS_AS(io::make_family("siso_generic_ext", {}), ConfigError);
  CHECK_THROWS_AS(io::make_family("siso_generic_ext", {{"T", "abc"}}), ConfigError);
  CHECK_THROWS_AS(io::make_family("siso_l_tap", {{"N", "4"}}), ConfigError);
  CHECK_THROWS_AS(io::make_family("siso_l_tap", {{"N", "4"}, {"delays", "0:x"}}), ConfigError);
  // In-range parse, out-of-range family parameters: still a config error.
  CHECK_THROWS_AS(io::make_family("siso_l_tap", {{"N", "2"}, {"delays", "0:5"}}), ConfigError);
  CHECK_THROWS_AS(io::make_family("siso_generic_ext", {{"T", "0"}}), ConfigError);
}

TEST_CASE("blocks dump is a bare array of flat blocks") {
  auto dir = tmp_dir();
  auto path = dir / "blocks.json";
  auto bb = build_blocks(ChannelFamily::siso_l_tap(2, {0, 1}));
  io::write_blocks_json(path, bb);

  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  for (const auto& block : j) {
    REQUIRE(block.is_array());
    REQUIRE(block.size() == 4);  // 2x2 entries, row-major
    for (const auto& z : block) {
      REQUIRE(z.is_array());
      REQUIRE(z.size() == 2);
    }
  }
  // Row-major spot check: second block is diag(1, -1).
  CHECK(j[1][0][0].get<double>() == 1.0);
  CHECK(j[1][3][0].get<double>() == -1.0);
  CHECK(j[1][1][0].get<double>() == 0.0);
}

TEST_CASE("instance files round-trip exactly") {
  auto dir = tmp_dir();
  auto path = dir / "instance.json";
  std::vector<ChannelFamily> fams = {
      ChannelFamily::siso_generic_ext(2),
      ChannelFamily::siso_l_tap(3, {0, 2}),
      ChannelFamily::siso_block_fading({1, 2}),
      ChannelFamily::mimo_constant(2, 2),
      ChannelFamily::mimo_constant_ext(1, 2, 2),
      ChannelFamily::mimo_generic_ext(2, 2, 2),
      ChannelFamily::acs_constant(2),
  };
  for (const auto& fam : fams) {
    auto inst = sample_instance(build_blocks(fam), 3, 2024);
    io::write_instance_json(path, inst);
    auto back = io::read_instance_json(path);
    CHECK(back.K == inst.K);
    CHECK(back.seed == inst.seed);
    CHECK(back.blocks.family.kind == fam.kind);
    REQUIRE(back.L() == inst.L());
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) {
        CHECK(back.tau[k][j] == inst.tau[k][j]);  // bit-exact coefficients
        CHECK(back.H[k][j].data() == inst.H[k][j].data());  // same assembly path
      }
  }
}

TEST_CASE("beam files round-trip exactly") {
  auto dir = tmp_dir();
  auto path = dir / "beams.json";
  auto inst = sample_instance(build_blocks(ChannelFamily::mimo_constant(2, 2)), 3, 7);
  solver::SolverConfig cfg;
  cfg.seed = 99;
  auto [beams, rep] = solver::solve(inst, cfg);
  io::write_beams_json(path, inst, beams, rep);
  auto back = io::read_beams_json(path);
  REQUIRE(back.v.size() == beams.v.size());
  REQUIRE(back.u.size() == beams.u.size());
  for (size_t k = 0; k < beams.v.size(); ++k) {
    CHECK(back.v[k] == beams.v[k]);
    CHECK(back.u[k] == beams.u[k]);
  }
}

TEST_CASE("pattern files accept entry-level or slot-level sets") {
  auto dir = tmp_dir();
  auto fam = ChannelFamily::siso_generic_ext(3);

  auto entry_path = dir / "entry.json";
  write_text(entry_path, R"({"R": [[0,1],[1,2]], "S": [[0],[2]]})");
  auto pf = io::read_pattern_json(entry_path, fam, 2);
  REQUIRE(pf.entry.has_value());
  CHECK_FALSE(pf.block.has_value());
  CHECK(pf.entry->R[1] == std::vector<int>{1, 2});
  CHECK(pf.entry->S[0] == std::vector<int>{0});
  CHECK(pf.entry->nr == 3);

  auto block_path = dir / "block.json";
  write_text(block_path, R"({"Rb": [[0],[1]], "Sb": [[0],[1]]})");
  auto bf = io::read_pattern_json(block_path, ChannelFamily::mimo_constant_ext(2, 2, 2), 2);
  REQUIRE(bf.block.has_value());
  CHECK_FALSE(bf.entry.has_value());
  CHECK(bf.block->Mr == 2);
  CHECK(bf.block->T == 2);
}

TEST_CASE("pattern files reject malformed content") {
  auto dir = tmp_dir();
  auto fam = ChannelFamily::siso_generic_ext(2);

  auto p1 = dir / "bad1.json";
  write_text(p1, R"({"R": [[0]], "S": [[0]]})");  // K=2 expected
  CHECK_THROWS_AS(io::read_pattern_json(p1, fam, 2), ConfigError);

  auto p2 = dir / "bad2.json";
  write_text(p2, R"({"R": [[0],[1]]})");  // S missing
  CHECK_THROWS_AS(io::read_pattern_json(p2, fam, 2), ConfigError);

  auto p3 = dir / "bad3.json";
  write_text(p3, R"({"R": [[0],[5]], "S": [[0],[1]]})");  // out of range
  CHECK_THROWS_AS(io::read_pattern_json(p3, fam, 2), ConfigError);

  auto p4 = dir / "bad4.json";
  write_text(p4, "not json at all");
  CHECK_THROWS_AS(io::read_pattern_json(p4, fam, 2), IoError);
}

TEST_CASE("missing and malformed files raise the right errors") {
  CHECK_THROWS_AS(io::read_instance_json("does_not_exist.json"), IoError);

  auto dir = tmp_dir();
  auto p = dir / "broken.json";
  write_text(p, "{\"family\": ");
  CHECK_THROWS_AS(io::read_instance_json(p), IoError);

  // Valid JSON, wrong shape.
  auto q = dir / "wrong.json";
  write_text(q, R"({"unexpected": 1})");
  CHECK_THROWS_AS(io::read_instance_json(q), ConfigError);
  CHECK_THROWS_AS(io::read_beams_json(q), ConfigError);
}

TEST_CASE("instance files notice tau shape mismatches") {
  auto dir = tmp_dir();
  auto path = dir / "instance.json";
  auto inst = sample_instance(build_blocks(ChannelFamily::siso_generic_ext(2)), 2, 1);
  io::write_instance_json(path, inst);

  // Corrupt the stored tau: drop one coefficient from one link.
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  in.close();
  j["tau"][0][1].erase(1);
  write_text(path, j.dump(2) + "\n");
  CHECK_THROWS_AS(io::read_instance_json(path), ConfigError);
}
