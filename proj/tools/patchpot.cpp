// patchpot: electrostatic patch-potential simulator for the sphere-plane
// gap. Subcommands: gen, sweep, ensemble, fit, validate.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "patchpot/analysis.hpp"
#include "patchpot/csv.hpp"
#include "patchpot/electrostatics.hpp"
#include "patchpot/patch_io.hpp"
#include "patchpot/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace patchpot;

namespace {

struct RunConfig {
  Geometry geom{0.15, 0.015};
  std::string layout = "hex";  // hex | single
  double r0 = 5e-4;
  double v0 = 0.1;
  double jitter = 0.25;
  double cx = 0.0, cy = 0.0;  // single-patch center
  double d_min = 1e-6, d_max = 1e-4;
  int points_per_decade = 12;
  QuadratureSpec quad;
  std::uint64_t seed = 1;
  int n_real = 100;
  std::string out_dir = "out";
};

double require_positive(double v, const char* field) {
  if (!(v > 0.0))
    throw std::invalid_argument(std::string("config field '") + field +
                                "' must be positive");
  return v;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " +
                                e.what());
  }
  RunConfig c;
  if (j.contains("geometry")) {
    c.geom.R = require_positive(j["geometry"].value("R", c.geom.R), "geometry.R");
    c.geom.Rm =
        require_positive(j["geometry"].value("Rm", c.geom.Rm), "geometry.Rm");
  }
  c.geom.validate();
  if (j.contains("patches")) {
    const auto& p = j["patches"];
    c.layout = p.value("layout", c.layout);
    if (c.layout != "hex" && c.layout != "single")
      throw std::invalid_argument("config field 'patches.layout' must be "
                                  "'hex' or 'single'");
    c.r0 = require_positive(p.value("r0", c.r0), "patches.r0");
    c.v0 = require_positive(p.value("v0", c.v0), "patches.v0");
    c.jitter = p.value("jitter", c.jitter);
    c.cx = p.value("cx", c.cx);
    c.cy = p.value("cy", c.cy);
  }
  if (j.contains("d_grid")) {
    const auto& g = j["d_grid"];
    c.d_min = require_positive(g.value("d_min", c.d_min), "d_grid.d_min");
    c.d_max = require_positive(g.value("d_max", c.d_max), "d_grid.d_max");
    c.points_per_decade = g.value("points_per_decade", c.points_per_decade);
    if (!(c.d_min < c.d_max))
      throw std::invalid_argument("config: d_grid.d_min must be < d_grid.d_max");
    if (c.points_per_decade < 8)
      throw std::invalid_argument(
          "config field 'd_grid.points_per_decade' must be >= 8");
  }
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    c.quad.radial_nodes_per_decade =
        q.value("radial_nodes_per_decade", c.quad.radial_nodes_per_decade);
    c.quad.min_angular_samples =
        q.value("min_angular_samples", c.quad.min_angular_samples);
    c.quad.angular_oversampling =
        q.value("angular_oversampling", c.quad.angular_oversampling);
    c.quad.d_min = q.value("d_min", c.quad.d_min);
    c.quad.validate();
  }
  c.quad.d_min = std::min(c.quad.d_min, c.d_min);
  c.seed = j.value("seed", c.seed);
  c.n_real = j.value("n_real", c.n_real);
  if (c.n_real < 1)
    throw std::invalid_argument("config field 'n_real' must be >= 1");
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

json config_json(const RunConfig& c) {
  return json{
      {"geometry", {{"R", c.geom.R}, {"Rm", c.geom.Rm}}},
      {"patches",
       {{"layout", c.layout},
        {"r0", c.r0},
        {"v0", c.v0},
        {"jitter", c.jitter},
        {"cx", c.cx},
        {"cy", c.cy}}},
      {"d_grid",
       {{"d_min", c.d_min},
        {"d_max", c.d_max},
        {"points_per_decade", c.points_per_decade}}},
      {"quadrature",
       {{"radial_nodes_per_decade", c.quad.radial_nodes_per_decade},
        {"min_angular_samples", c.quad.min_angular_samples},
        {"angular_oversampling", c.quad.angular_oversampling},
        {"d_min", c.quad.d_min}}},
      {"seed", c.seed},
      {"n_real", c.n_real},
      {"out_dir", c.out_dir}};
}

std::string config_hash(const RunConfig& c) {
  RunConfig key = c;
  key.out_dir.clear();  // artifact names should not depend on the destination
  const std::string s = config_json(key).dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

PatchMap build_map(const RunConfig& c) {
  if (c.layout == "single")
    return generate_single_patch(c.geom, c.r0, c.v0, c.cx, c.cy);
  return generate_homogeneous(c.geom, c.r0, c.v0, c.jitter, c.seed);
}

json validity_table(const RunConfig& c, const std::vector<double>& d_grid) {
  json rows = json::array();
  for (double d : d_grid) {
    const ValidityReport v = validity(c.geom, d, c.r0);
    rows.push_back({{"d_m", d},
                    {"pfa_ok", v.pfa_ok},
                    {"patch_image_ok", v.patch_image_ok},
                    {"regime", to_string(classify_regime(c.geom, c.r0, d))}});
  }
  return rows;
}

void write_manifest(const RunConfig& c, const std::string& hash,
                    const std::string& command, const json& outputs,
                    const json& extra) {
  json m{{"tool", "patchpot"},
         {"version", kVersion},
         {"command", command},
         {"timestamp_utc", timestamp_utc()},
         {"config_hash", hash},
         {"config", config_json(c)},
         {"outputs", outputs}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = *it;
  const fs::path path =
      fs::path(c.out_dir) / ("manifest_" + command + "_" + hash + ".json");
  write_file(path.string(), m.dump(2) + "\n");
  std::cout << "manifest=" << path.string() << "\n";
}

int cmd_gen(const RunConfig& c) {
  fs::create_directories(c.out_dir);
  const std::string hash = config_hash(c);
  const PatchMap map = build_map(c);
  const fs::path path = fs::path(c.out_dir) / ("patchmap_" + hash + ".json");
  write_patch_map(map, path.string());
  const ValidityReport v_near = validity(c.geom, c.d_min, c.r0);
  const ValidityReport v_far = validity(c.geom, c.d_max, c.r0);
  std::cout << "patch_count=" << map.disks().size() << "\n"
            << "file=" << path.string() << "\n"
            << "validity_at_d_min: pfa_ok=" << v_near.pfa_ok
            << " patch_image_ok=" << v_near.patch_image_ok << "\n"
            << "validity_at_d_max: pfa_ok=" << v_far.pfa_ok
            << " patch_image_ok=" << v_far.patch_image_ok << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& c, const std::string& map_file) {
  fs::create_directories(c.out_dir);
  const std::string hash = config_hash(c);
  const PatchMap map =
      map_file.empty() ? build_map(c) : read_patch_map(map_file);
  const auto d_grid = log_spaced(c.d_min, c.d_max, c.points_per_decade);
  const VmCurve curve = sweep(map, d_grid, c.quad);
  const fs::path path = fs::path(c.out_dir) / ("curve_" + hash + ".csv");
  write_file(path.string(), curve_to_csv(curve));
  std::cout << "curve=" << path.string() << "\n";
  write_manifest(c, hash, "sweep", json::array({path.string()}),
                 {{"validity", validity_table(c, d_grid)},
                  {"map_file", map_file}});
  return 0;
}

int cmd_ensemble(const RunConfig& c, int threads) {
  fs::create_directories(c.out_dir);
  const std::string hash = config_hash(c);
  const auto d_grid = log_spaced(c.d_min, c.d_max, c.points_per_decade);
  const EnsembleStats st = ensemble_vm(c.geom, c.r0, c.v0, c.jitter, c.n_real,
                                       c.seed, d_grid, c.quad, threads);

  auto opt = [](double v) {  // empty-marked when undefined (n_real = 1)
    return std::isnan(v) ? std::string() : format_double(v);
  };
  std::string csv =
      "d_m,mean_vm_energy_V,std_vm_energy_V,mean_vm_force_V,std_vm_force_V,"
      "mean_diff_V,std_diff_V\n";
  for (std::size_t k = 0; k < st.d.size(); ++k) {
    csv += format_double(st.d[k]) + "," + format_double(st.mean_energy[k]) +
           "," + opt(st.std_energy[k]) + "," + format_double(st.mean_force[k]) +
           "," + opt(st.std_force[k]) + "," + format_double(st.mean_diff[k]) +
           "," + opt(st.std_diff[k]) + "\n";
  }
  const fs::path stats_path =
      fs::path(c.out_dir) / ("ensemble_" + hash + ".csv");
  write_file(stats_path.string(), csv);

  std::string fits_csv = "realization,a_V,b_V_per_efold,b_stderr_V_per_efold\n";
  for (std::size_t i = 0; i < st.fits.size(); ++i) {
    fits_csv += std::to_string(i) + "," + format_double(st.fits[i].a) + "," +
                format_double(st.fits[i].b) + "," +
                format_double(st.fits[i].b_stderr) + "\n";
  }
  const fs::path fits_path =
      fs::path(c.out_dir) / ("ensemble_fits_" + hash + ".csv");
  write_file(fits_path.string(), fits_csv);

  double b_mean = 0.0, b_var = 0.0;
  for (const LogFit& f : st.fits) b_mean += f.b;
  b_mean /= static_cast<double>(st.fits.size());
  for (const LogFit& f : st.fits) b_var += (f.b - b_mean) * (f.b - b_mean);
  const double b_std =
      st.fits.size() > 1
          ? std::sqrt(b_var / (static_cast<double>(st.fits.size()) - 1.0))
          : 0.0;

  std::cout << "stats=" << stats_path.string() << "\n"
            << "fits=" << fits_path.string() << "\n"
            << "b_mean_V_per_efold=" << format_double(b_mean) << "\n"
            << "b_std_V_per_efold=" << format_double(b_std) << "\n"
            << "paired_diff_mean_V=" << format_double(st.diff_mean) << "\n"
            << "paired_diff_stderr_V=" << format_double(st.diff_stderr) << "\n";
  write_manifest(c, hash, "ensemble",
                 json::array({stats_path.string(), fits_path.string()}),
                 {{"n_real", c.n_real},
                  {"threads", threads},
                  {"b_mean_V_per_efold", b_mean},
                  {"b_std_V_per_efold", b_std},
                  {"paired_diff_mean_V", st.diff_mean},
                  {"paired_diff_stderr_V", st.diff_stderr}});
  return 0;
}

int cmd_fit(const std::string& input, std::optional<double> d_lo,
            std::optional<double> d_hi, const std::string& variant) {
  const std::string text = read_file(input);
  std::vector<std::pair<double, double>> data;
  bool external = false;
  if (text.rfind("d_m,vm_V", 0) == 0) {
    data = parse_external_csv(text);
    external = true;
  } else {
    const VmCurve curve = curve_from_csv(text);
    for (const VmCurvePoint& p : curve.points) {
      double v = p.vm_energy;
      if (variant == "force") v = p.vm_force;
      if (variant == "analytic") v = p.vm_analytic;
      data.emplace_back(p.d, v);
    }
  }
  if (data.empty()) throw std::runtime_error("fit: no data rows in " + input);
  double lo = d_lo.value_or(0.0), hi = d_hi.value_or(0.0);
  if (!d_lo || !d_hi) {
    lo = hi = data.front().first;
    for (const auto& [d, v] : data) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  int in_window = 0;
  for (const auto& [d, v] : data)
    if (d >= lo * (1.0 - 1e-12) && d <= hi * (1.0 + 1e-12)) ++in_window;
  if (in_window < 6)
    throw std::runtime_error("fit: fewer than 6 points in window");
  const LogFit fit = external ? fit_external(data, lo, hi)
                              : fit_points(data, lo, hi);
  std::cout << format_fit_report(fit, external);
  return 0;
}

int cmd_validate(const RunConfig& c) {
  const auto d_grid = log_spaced(c.d_min, c.d_max, c.points_per_decade);
  std::cout << "d_m,pfa_ok,patch_image_ok,regime\n";
  for (double d : d_grid) {
    const ValidityReport v = validity(c.geom, d, c.r0);
    std::cout << format_double(d) << ',' << (v.pfa_ok ? 1 : 0) << ','
              << (v.patch_image_ok ? 1 : 0) << ','
              << to_string(classify_regime(c.geom, c.r0, d)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electrostatic patch-potential simulator (sphere-plane PFA)"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, map_file, fit_input, variant = "energy";
  std::optional<std::uint64_t> seed_override;
  std::optional<double> d_lo, d_hi;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    cmd->add_option("--config", config_path, "RunConfig JSON file")
        ->required(config_required);
    cmd->add_option("--seed", seed_override, "Override the config master seed");
    cmd->add_option("--out", out_dir, "Override the config output directory");
    cmd->add_option("--threads", threads, "Worker thread count")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* gen = app.add_subcommand("gen", "Generate a patch map file");
  add_common(gen, true);
  CLI::App* swp = app.add_subcommand("sweep", "Sweep V_m over distance");
  add_common(swp, true);
  swp->add_option("--map", map_file, "Use an existing patch map file");
  CLI::App* ens = app.add_subcommand("ensemble", "Ensemble V_m statistics");
  add_common(ens, true);
  CLI::App* fit = app.add_subcommand("fit", "Fit a + b ln d to a curve CSV");
  fit->add_option("--input", fit_input, "Curve CSV or external d_m,vm_V CSV")
      ->required();
  fit->add_option("--d-lo", d_lo, "Fit window lower edge [m]");
  fit->add_option("--d-hi", d_hi, "Fit window upper edge [m]");
  fit->add_option("--variant", variant, "energy|force|analytic")
      ->check(CLI::IsMember({"energy", "force", "analytic"}));
  CLI::App* val = app.add_subcommand("validate", "Validity table over the d grid");
  add_common(val, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
      if (seed_override) config.seed = *seed_override;
      if (!out_dir.empty()) config.out_dir = out_dir;
    }
    if (gen->parsed()) return cmd_gen(config);
    if (swp->parsed()) return cmd_sweep(config, map_file);
    if (ens->parsed()) return cmd_ensemble(config, threads);
    if (fit->parsed()) return cmd_fit(fit_input, d_lo, d_hi, variant);
    if (val->parsed()) return cmd_validate(config);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
