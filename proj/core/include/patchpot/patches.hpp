#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "patchpot/geometry.hpp"

namespace patchpot {

/// Circular surface patch at a fixed potential.
struct Disk {
  double cx = 0.0;         // center x [m]
  double cy = 0.0;         // center y [m]
  double radius = 0.0;     // [m]
  double potential = 0.0;  // [V]
};

/// Surface potential map: a uniform background plus circular patches.
/// Immutable after construction; point queries are resolved with a
/// nearest-center rule for overlapping disks (ties by list index).
class PatchMap {
 public:
  PatchMap(Geometry geom, double background, std::vector<Disk> disks,
           double r0_nominal, double v0_nominal,
           std::optional<std::uint64_t> seed = std::nullopt);

  const Geometry& geometry() const { return geom_; }
  double background() const { return background_; }
  const std::vector<Disk>& disks() const { return disks_; }
  double r0_nominal() const { return r0_nominal_; }
  double v0_nominal() const { return v0_nominal_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  /// Potential at a plate point. Throws std::domain_error outside the plate.
  double potential_at(double x, double y) const;

  /// Range of values potential_at can take.
  double min_potential() const { return min_pot_; }
  double max_potential() const { return max_pot_; }

 private:
  void build_index();
  void cell_range(double lo, double hi, int n, double origin, double cell,
                  int& i0, int& i1) const;

  Geometry geom_;
  double background_;
  std::vector<Disk> disks_;
  double r0_nominal_;
  double v0_nominal_;
  std::optional<std::uint64_t> seed_;
  double min_pot_, max_pot_;

  // uniform grid over the plate bounding box; each cell lists candidate disks
  double cell_ = 0.0, x0_ = 0.0, y0_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::int32_t>> cells_;
};

/// Deterministic seed derivation for ensemble realizations.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Random +-v0 disks of radius r0 on a jittered hexagonal lattice of pitch
/// 2 r0 covering the plate; background 0. Deterministic in all arguments.
PatchMap generate_homogeneous(const Geometry& geom, double r0, double v0,
                              double jitter, std::uint64_t seed);

/// A single disk of radius r0 at potential v0, default at the plate center.
PatchMap generate_single_patch(const Geometry& geom, double r0, double v0,
                               double cx = 0.0, double cy = 0.0);

/// Angular average of potential_at over n_phi equally spaced angles.
double ring_average(const PatchMap& map, double r, int n_phi);

/// Default angular sample count: >= 8 samples per patch arc on the ring.
int auto_angular_samples(const PatchMap& map, double r);

/// First and second angular moments of the potential on a ring, computed
/// exactly by partitioning the ring into arcs of constant potential.
struct RingMoments {
  double mean;
  double mean_sq;
};
RingMoments ring_moments(const PatchMap& map, double r);

/// Radial grid: node 0, log-spaced nodes from r_min to Rm, plus paired
/// breakpoints straddling each disk tangency radius so that the ring
/// average is smooth within every cell.
struct RadialGridSpec {
  int nodes_per_decade = 160;
  double d_min = 1e-8;  // smallest distance the grid will serve
  bool edge_breakpoints = true;

  /// Throws std::invalid_argument if nodes_per_decade < 4 or d_min <= 0.
  void validate() const;
};
std::vector<double> radial_grid(const PatchMap& map, const RadialGridSpec& spec);

/// Ring-averaged potential sampled on a radial grid.
struct RadialProfile {
  std::vector<double> r_nodes;  // strictly increasing, first 0, last Rm
  std::vector<double> values;
};
RadialProfile radial_profile(const PatchMap& map, const RadialGridSpec& spec);

/// Surface average of the potential over the plate (adaptive polar
/// quadrature; abs_tol is in volts).
double area_average(const PatchMap& map, double abs_tol = 1e-9);

/// Closed-form surface average, valid for non-overlapping disks fully
/// inside the plate.
double area_average_analytic(const PatchMap& map);

/// RMS of the ring average over an ensemble of homogeneous realizations,
/// with the fitted log-log slope of S(r) over [5 r0, Rm].
struct RingRmsResult {
  std::vector<double> r;
  std::vector<double> s;
  double loglog_slope;
};
RingRmsResult ring_rms_ensemble(const Geometry& geom, double r0, double v0,
                                double jitter, int n_real,
                                std::uint64_t master_seed,
                                const std::vector<double>& r_nodes);

}  // namespace patchpot
