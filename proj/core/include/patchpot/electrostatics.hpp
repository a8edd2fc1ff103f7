#pragma once

#include <vector>

#include "patchpot/geometry.hpp"
#include "patchpot/patches.hpp"

namespace patchpot {

inline constexpr double kEps0 = 8.8541878128e-12;  // F/m, CODATA

/// Discretization of the polar free-energy integral. The radial grid is
/// distance-independent (built for d >= d_min) so that the force is the
/// exact d-derivative of the energy on the same grid.
struct QuadratureSpec {
  int radial_nodes_per_decade = 160;
  int min_angular_samples = 64;
  int angular_oversampling = 8;
  double d_min = 1e-8;
  bool edge_breakpoints = true;

  /// Throws std::invalid_argument if nodes/decade < 24 or angular < 64.
  void validate() const;
  RadialGridSpec radial() const;
};

/// Ring moments of a map on the quadrature grid. Independent of d; all
/// distance-dependent weights are closed-form kernel integrals per cell.
class GapSamples {
 public:
  GapSamples(const PatchMap& map, const QuadratureSpec& spec);

  const Geometry& geometry() const { return geom_; }
  const std::vector<double>& r_nodes() const { return r_; }

  double free_energy(double d, double va) const;  // [J]
  double force(double d, double va) const;        // [N], attractive magnitude
  double vm_energy(double d) const;               // [V]
  double vm_force(double d) const;                // [V]

  /// The ring averages as a RadialProfile on the quadrature grid.
  RadialProfile profile() const;

 private:
  // weighted sums of (1, mean, mean_sq) with per-cell kernel integrals
  void accumulate(double d, bool force_weights, double& w_sum,
                  double& wv_sum, double& wvv_sum) const;

  Geometry geom_;
  std::vector<double> r_;     // grid nodes, r_[0] = 0, back() = Rm
  std::vector<double> u_;     // r^2 / 2R per node
  std::vector<double> mean_;  // ring mean per node
  std::vector<double> msq_;   // ring mean square per node
};

/// Electrostatic free energy of the gap at applied voltage va.
double free_energy(const PatchMap& map, double d, double va,
                   const QuadratureSpec& spec);

/// Magnitude of the attractive force, -dU/dd.
double force(const PatchMap& map, double d, double va,
             const QuadratureSpec& spec);

/// Energy-minimizing applied voltage (closed-form minimizer of the
/// quadratic U(va)): kernel-weighted average of the surface potential.
double vm_energy(const PatchMap& map, double d, const QuadratureSpec& spec);

/// Force-minimizing applied voltage (force-kernel-weighted average).
double vm_force(const PatchMap& map, double d, const QuadratureSpec& spec);

/// Brute-force oracle: scans free_energy over a uniform va grid and
/// refines the minimum parabolically. Throws std::runtime_error if the
/// minimum sits at a window edge.
double vm_scan(const GapSamples& samples, double d, double window_lo,
               double window_hi, int steps);
double vm_scan(const PatchMap& map, double d, const QuadratureSpec& spec,
               double window_lo, double window_hi, int steps);

/// Integration-by-parts remainder Q(d) = -int log(d + r^2/2R) dVbar(r),
/// evaluated as a midpoint Stieltjes sum against the profile differences.
double compute_Q(const RadialProfile& profile, const Geometry& geom, double d);

/// Minimizing voltage from the boundary terms and Q(d):
/// [Vbar(Rm) log(d+Rm^2/2R) - Vbar(0) log d + Q(d)] /
/// [log(d+Rm^2/2R) - log d].
double vm_analytic(const RadialProfile& profile, const Geometry& geom,
                   double d);

struct VmResult {
  double d;
  double vm_energy;
  double vm_force;
  double vm_analytic;
  double q;  // Q(d) of the profile used by vm_analytic
  ValidityReport validity;
};

}  // namespace patchpot
