#pragma once

namespace patchpot {

/// Sphere-plane geometry under the proximity force approximation.
/// R is the curvature radius of the spherical surface, Rm the radius of
/// both plates. All lengths are in meters.
struct Geometry {
  double R = 0.0;
  double Rm = 0.0;

  /// Rm^2 / (2R), the gap contribution of the sphere at the plate edge.
  double edge_gap_term() const { return Rm * Rm / (2.0 * R); }

  /// Throws std::invalid_argument unless R > 0, Rm > 0 and Rm <= R.
  void validate() const;
};

/// Local gap d + r^2/(2R) between the surfaces at plate radius r.
double gap(const Geometry& g, double d, double r);

/// Radial weight density of the free energy, w(r; d) = r / (d + r^2/2R).
/// Peaks at r = sqrt(2 R d).
double energy_kernel(const Geometry& g, double d, double r);

/// Radial weight density of the force, w2(r; d) = r / (d + r^2/2R)^2.
/// Equal to -d/dd of the energy kernel; more sharply peaked at small r.
double force_kernel(const Geometry& g, double d, double r);

struct KernelNorms {
  double energy_norm;  // integral of w over [0, Rm]  = R ln(1 + Rm^2/2Rd)
  double force_norm;   // integral of w2 over [0, Rm] = R (Rm^2/2R) / (d (d + Rm^2/2R))
};

/// Closed-form radial integrals of the two kernels over the full plate.
KernelNorms kernel_norms(const Geometry& g, double d);

struct ValidityReport {
  bool pfa_ok;          // d < Rm^2/2R (strict)
  bool patch_image_ok;  // r0 > sqrt(2 R d) (strict)
};

/// Advisory model-validity predicates; never fatal.
ValidityReport validity(const Geometry& g, double d, double r0);

}  // namespace patchpot
