#include "patchpot/electrostatics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace patchpot {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

void check_profile(const RadialProfile& p, const Geometry& geom) {
  if (p.r_nodes.size() < 2 || p.r_nodes.size() != p.values.size())
    throw std::domain_error("RadialProfile: malformed node/value arrays");
  if (p.r_nodes.front() != 0.0)
    throw std::domain_error("RadialProfile: first node must be 0");
  if (std::abs(p.r_nodes.back() - geom.Rm) > 1e-12 * geom.Rm)
    throw std::domain_error("RadialProfile: profile must reach Rm");
  for (std::size_t k = 0; k + 1 < p.r_nodes.size(); ++k)
    if (!(p.r_nodes[k] < p.r_nodes[k + 1]))
      throw std::domain_error("RadialProfile: nodes must be strictly increasing");
}
}  // namespace

void QuadratureSpec::validate() const {
  if (radial_nodes_per_decade < 24)
    throw std::invalid_argument("QuadratureSpec: radial nodes/decade >= 24");
  if (min_angular_samples < 64)
    throw std::invalid_argument("QuadratureSpec: angular samples >= 64");
  if (angular_oversampling < 1)
    throw std::invalid_argument("QuadratureSpec: angular oversampling >= 1");
  if (!(d_min > 0.0))
    throw std::invalid_argument("QuadratureSpec: d_min must be positive");
}

RadialGridSpec QuadratureSpec::radial() const {
  return {radial_nodes_per_decade, d_min, edge_breakpoints};
}

GapSamples::GapSamples(const PatchMap& map, const QuadratureSpec& spec)
    : geom_(map.geometry()) {
  spec.validate();
  r_ = radial_grid(map, spec.radial());
  u_.reserve(r_.size());
  mean_.reserve(r_.size());
  msq_.reserve(r_.size());
  for (double r : r_) {
    u_.push_back(r * r / (2.0 * geom_.R));
    const RingMoments m = ring_moments(map, r);
    mean_.push_back(m.mean);
    msq_.push_back(m.mean_sq);
  }
}

void GapSamples::accumulate(double d, bool force_weights, double& w_sum,
                            double& wv_sum, double& wvv_sum) const {
  if (!(d > 0.0)) throw std::domain_error("distance d must be positive");
  w_sum = wv_sum = wvv_sum = 0.0;
  const std::size_t n = r_.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // exact kernel integral over the cell [r_k, r_{k+1}]
    const double w =
        force_weights
            ? geom_.R * (1.0 / (d + u_[k]) - 1.0 / (d + u_[k + 1]))
            : geom_.R * std::log1p((u_[k + 1] - u_[k]) / (d + u_[k]));
    double v, vv;
    if (k == 0) {
      // inner cell: the ring average is constant at its r = 0 value
      v = mean_[0];
      vv = msq_[0];
    } else {
      v = (mean_[k] + mean_[k + 1]) / 2.0;
      vv = (msq_[k] + msq_[k + 1]) / 2.0;
    }
    w_sum += w;
    wv_sum += w * v;
    wvv_sum += w * vv;
  }
}

double GapSamples::free_energy(double d, double va) const {
  double w, wv, wvv;
  accumulate(d, false, w, wv, wvv);
  return kEps0 * kPi * (va * va * w - 2.0 * va * wv + wvv);
}

double GapSamples::force(double d, double va) const {
  double w, wv, wvv;
  accumulate(d, true, w, wv, wvv);
  return kEps0 * kPi * (va * va * w - 2.0 * va * wv + wvv);
}

double GapSamples::vm_energy(double d) const {
  double w, wv, wvv;
  accumulate(d, false, w, wv, wvv);
  return wv / w;
}

double GapSamples::vm_force(double d) const {
  double w, wv, wvv;
  accumulate(d, true, w, wv, wvv);
  return wv / w;
}

RadialProfile GapSamples::profile() const { return {r_, mean_}; }

double free_energy(const PatchMap& map, double d, double va,
                   const QuadratureSpec& spec) {
  return GapSamples(map, spec).free_energy(d, va);
}

double force(const PatchMap& map, double d, double va,
             const QuadratureSpec& spec) {
  return GapSamples(map, spec).force(d, va);
}

double vm_energy(const PatchMap& map, double d, const QuadratureSpec& spec) {
  return GapSamples(map, spec).vm_energy(d);
}

double vm_force(const PatchMap& map, double d, const QuadratureSpec& spec) {
  return GapSamples(map, spec).vm_force(d);
}

double vm_scan(const GapSamples& samples, double d, double window_lo,
               double window_hi, int steps) {
  if (!(window_lo < window_hi))
    throw std::invalid_argument("vm_scan: empty voltage window");
  if (steps < 1000) throw std::invalid_argument("vm_scan: steps >= 1000");
  const double h = (window_hi - window_lo) / steps;
  double best_u = std::numeric_limits<double>::infinity();
  int best_k = -1;
  for (int k = 0; k <= steps; ++k) {
    const double u = samples.free_energy(d, window_lo + k * h);
    if (u < best_u) {
      best_u = u;
      best_k = k;
    }
  }
  if (best_k == 0 || best_k == steps)
    throw std::runtime_error(
        "vm_scan: minimum at window edge; window excludes the minimizer");
  // parabolic refinement; U is exactly quadratic in Va
  const double um = samples.free_energy(d, window_lo + (best_k - 1) * h);
  const double up = samples.free_energy(d, window_lo + (best_k + 1) * h);
  const double denom = um - 2.0 * best_u + up;
  double va = window_lo + best_k * h;
  if (denom > 0.0) va += h * (um - up) / (2.0 * denom);
  return va;
}

double vm_scan(const PatchMap& map, double d, const QuadratureSpec& spec,
               double window_lo, double window_hi, int steps) {
  return vm_scan(GapSamples(map, spec), d, window_lo, window_hi, steps);
}

double compute_Q(const RadialProfile& profile, const Geometry& geom,
                 double d) {
  check_profile(profile, geom);
  if (!(d > 0.0)) throw std::domain_error("compute_Q: d must be positive");
  double q = 0.0;
  for (std::size_t k = 0; k + 1 < profile.r_nodes.size(); ++k) {
    const double mid = (profile.r_nodes[k] + profile.r_nodes[k + 1]) / 2.0;
    const double dv = profile.values[k + 1] - profile.values[k];
    if (dv == 0.0) continue;
    q -= std::log(d + mid * mid / (2.0 * geom.R)) * dv;
  }
  return q;
}

double vm_analytic(const RadialProfile& profile, const Geometry& geom,
                   double d) {
  check_profile(profile, geom);
  if (!(d > 0.0)) throw std::domain_error("vm_analytic: d must be positive");
  const double q = compute_Q(profile, geom, d);
  const double log_outer = std::log(d + geom.edge_gap_term());
  const double log_d = std::log(d);
  return (profile.values.back() * log_outer - profile.values.front() * log_d +
          q) /
         (log_outer - log_d);
}

}  // namespace patchpot
