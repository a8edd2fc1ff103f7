#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "patchpot/electrostatics.hpp"
#include "patchpot/patches.hpp"

namespace patchpot {

enum class Regime { close, intermediate, far };
const char* to_string(Regime r);

/// Distance regime relative to d1 = r0^2/2R and d2 = Rm^2/2R:
/// close if d < d1 and |ln d| > |ln d2|, far if d > d2, else intermediate.
Regime classify_regime(const Geometry& geom, double r0, double d);

struct VmCurvePoint {
  double d;
  double vm_energy;
  double vm_force;
  double vm_analytic;
  ValidityReport validity;
  Regime regime;
};

struct VmCurve {
  Geometry geom;
  std::vector<VmCurvePoint> points;  // d strictly increasing
};

/// Log-spaced grid including both endpoints, at least per_decade points
/// per decade.
std::vector<double> log_spaced(double lo, double hi, int per_decade);

/// Samples all three V_m variants over a distance grid.
VmCurve sweep(const PatchMap& map, const std::vector<double>& d_grid,
              const QuadratureSpec& spec);

enum class VmVariant { energy, force, analytic };

struct LogFit {
  double a = 0.0;             // [V]
  double b = 0.0;             // [V per e-fold of d]
  double b_stderr = 0.0;      // OLS standard error of b
  double d_lo = 0.0, d_hi = 0.0;
  double residual_rms = 0.0;  // [V]
  double r_squared = 1.0;     // 1 by convention when total variance is 0
  int n = 0;
};

/// Ordinary least squares of V against ln d over [d_lo, d_hi].
/// Throws std::runtime_error with fewer than 2 distinct d in the window.
LogFit fit_points(const std::vector<std::pair<double, double>>& data,
                  double d_lo, double d_hi);
LogFit fit_log(const VmCurve& curve, double d_lo, double d_hi,
               VmVariant variant);
LogFit fit_external(const std::vector<std::pair<double, double>>& data,
                    double d_lo, double d_hi);

/// Intermediate-regime prediction of the a + b ln d law from the profile:
/// Q0 = Q(sqrt(d1 d2)) / L with L = ln(Rm^2/2R),
/// a_pred = Vbar(Rm) + Q0, b_pred = (Vbar(Rm) + Q0 - Vbar(0)) / L.
struct RegimePrediction {
  double d1;      // r0^2/2R
  double d2;      // Rm^2/2R
  double L;       // ln(Rm^2/2R)
  double q0;      // [V]
  double a_pred;  // [V]
  double b_pred;  // [V per e-fold]
};
RegimePrediction predict_intermediate(const RadialProfile& profile,
                                      const Geometry& geom, double r0);

/// Default fit window [10 d1, d2/10].
std::pair<double, double> default_fit_window(const Geometry& geom, double r0);

/// Ensemble statistics of V_m over homogeneous random realizations.
/// Deterministic given master_seed, independent of thread count.
struct EnsembleStats {
  std::vector<double> d;
  std::vector<double> mean_energy, std_energy;
  std::vector<double> mean_force, std_force;
  std::vector<double> mean_diff, std_diff;  // vm_force - vm_energy
  std::vector<LogFit> fits;  // per realization, energy variant, default window
  double diff_mean = 0.0;    // paired mean over window, across realizations
  double diff_stderr = 0.0;
  int n_real = 0;
};
EnsembleStats ensemble_vm(const Geometry& geom, double r0, double v0,
                          double jitter, int n_real,
                          std::uint64_t master_seed,
                          const std::vector<double>& d_grid,
                          const QuadratureSpec& spec, int threads = 1);

}  // namespace patchpot
