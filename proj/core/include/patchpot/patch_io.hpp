#pragma once

#include <string>

#include "patchpot/patches.hpp"

namespace patchpot {

/// JSON serialization of a PatchMap; lossless round trip.
std::string patch_map_to_string(const PatchMap& map);
PatchMap patch_map_from_string(const std::string& text);

void write_patch_map(const PatchMap& map, const std::string& path);
PatchMap read_patch_map(const std::string& path);

}  // namespace patchpot
