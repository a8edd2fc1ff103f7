#include "patchpot/patch_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace patchpot {

using nlohmann::json;

std::string patch_map_to_string(const PatchMap& map) {
  json j;
  j["geometry"] = {{"R", map.geometry().R}, {"Rm", map.geometry().Rm}};
  j["background"] = map.background();
  j["r0_nominal"] = map.r0_nominal();
  j["v0_nominal"] = map.v0_nominal();
  if (map.seed()) j["seed"] = *map.seed();
  json disks = json::array();
  for (const Disk& d : map.disks())
    disks.push_back({d.cx, d.cy, d.radius, d.potential});
  j["disks"] = std::move(disks);
  return j.dump(2) + "\n";
}

PatchMap patch_map_from_string(const std::string& text) {
  json j = json::parse(text);
  Geometry geom{j.at("geometry").at("R").get<double>(),
                j.at("geometry").at("Rm").get<double>()};
  std::vector<Disk> disks;
  for (const auto& row : j.at("disks")) {
    if (!row.is_array() || row.size() != 4)
      throw std::runtime_error("patch map: disk rows must have 4 entries");
    disks.push_back({row[0].get<double>(), row[1].get<double>(),
                     row[2].get<double>(), row[3].get<double>()});
  }
  std::optional<std::uint64_t> seed;
  if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
  return PatchMap(geom, j.at("background").get<double>(), std::move(disks),
                  j.at("r0_nominal").get<double>(),
                  j.at("v0_nominal").get<double>(), seed);
}

void write_patch_map(const PatchMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << patch_map_to_string(map);
  if (!out) throw std::runtime_error("write failed: " + path);
}

PatchMap read_patch_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open patch map file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return patch_map_from_string(text);
}

}  // namespace patchpot
