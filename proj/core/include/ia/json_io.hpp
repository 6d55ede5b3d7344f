#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ia/channel.hpp"
#include "ia/solver.hpp"
#include "ia/supports.hpp"

namespace ia::io {

/**
 * On-disk formats. Complex scalars are [re, im] pairs; block matrices are
 * flat row-major arrays of pairs. File-system failures raise IoError,
 * malformed or inconsistent content raises ConfigError.
 */

/// Builds a family from CLI-style parameters (T=..., Mt=..., delays=0:1:3).
/// Integer lists accept ':' or ',' separators. Unknown or missing keys
/// raise ConfigError.
channel::ChannelFamily make_family(const std::string& name,
                                   const std::map<std::string, std::string>& params);

void write_blocks_json(const std::filesystem::path& path, const channel::BuildingBlocks& blocks);

void write_instance_json(const std::filesystem::path& path, const channel::ChannelInstance& inst);
/// Rebuilds blocks from the stored family and reassembles H from tau, so a
/// round-tripped instance satisfies the assembly invariant by construction.
channel::ChannelInstance read_instance_json(const std::filesystem::path& path);

void write_beams_json(const std::filesystem::path& path, const channel::ChannelInstance& inst,
                      const solver::BeamformerSet& beams, const solver::FeasibilityReport& report);
solver::BeamformerSet read_beams_json(const std::filesystem::path& path);

/// Pattern files carry either entry-level sets {"R": [...], "S": [...]} or
/// slot-level sets {"Rb": [...], "Sb": [...]}; indices are 0-based.
struct PatternFile {
  std::optional<supports::SupportPattern> entry;
  std::optional<supports::BlockSupportPattern> block;
};
PatternFile read_pattern_json(const std::filesystem::path& path,
                              const channel::ChannelFamily& family, int K);

}  // namespace ia::io
