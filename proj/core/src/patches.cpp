#include "patchpot/patches.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace patchpot {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw; identical on every platform
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

PatchMap::PatchMap(Geometry geom, double background, std::vector<Disk> disks,
                   double r0_nominal, double v0_nominal,
                   std::optional<std::uint64_t> seed)
    : geom_(geom),
      background_(background),
      disks_(std::move(disks)),
      r0_nominal_(r0_nominal),
      v0_nominal_(v0_nominal),
      seed_(seed) {
  geom_.validate();
  min_pot_ = background_;
  max_pot_ = background_;
  for (std::size_t i = 0; i < disks_.size(); ++i) {
    const Disk& dk = disks_[i];
    if (!(dk.radius > 0.0))
      throw std::invalid_argument("Disk " + std::to_string(i) +
                                  ": radius must be positive");
    if (std::hypot(dk.cx, dk.cy) > geom_.Rm + dk.radius)
      throw std::invalid_argument("Disk " + std::to_string(i) +
                                  ": does not intersect the plate");
    min_pot_ = std::min(min_pot_, dk.potential);
    max_pot_ = std::max(max_pot_, dk.potential);
  }
  build_index();
}

void PatchMap::build_index() {
  if (disks_.empty()) return;
  double max_rad = 0.0;
  for (const Disk& dk : disks_) max_rad = std::max(max_rad, dk.radius);
  cell_ = std::max(2.0 * max_rad, geom_.Rm / 64.0);
  x0_ = -(geom_.Rm + max_rad);
  y0_ = x0_;
  nx_ = static_cast<int>(std::ceil(-2.0 * x0_ / cell_)) + 1;
  ny_ = nx_;
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t i = 0; i < disks_.size(); ++i) {
    const Disk& dk = disks_[i];
    int ix0, ix1, iy0, iy1;
    cell_range(dk.cx - dk.radius, dk.cx + dk.radius, nx_, x0_, cell_, ix0, ix1);
    cell_range(dk.cy - dk.radius, dk.cy + dk.radius, ny_, y0_, cell_, iy0, iy1);
    for (int iy = iy0; iy <= iy1; ++iy)
      for (int ix = ix0; ix <= ix1; ++ix)
        cells_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(
            static_cast<std::int32_t>(i));
  }
}

void PatchMap::cell_range(double lo, double hi, int n, double origin,
                          double cell, int& i0, int& i1) const {
  i0 = std::clamp(static_cast<int>(std::floor((lo - origin) / cell)), 0, n - 1);
  i1 = std::clamp(static_cast<int>(std::floor((hi - origin) / cell)), 0, n - 1);
}

double PatchMap::potential_at(double x, double y) const {
  const double rr = std::hypot(x, y);
  if (rr > geom_.Rm * (1.0 + 1e-12))
    throw std::domain_error("potential_at: point outside the plate");
  if (disks_.empty()) return background_;
  const int ix = std::clamp(static_cast<int>(std::floor((x - x0_) / cell_)), 0,
                            nx_ - 1);
  const int iy = std::clamp(static_cast<int>(std::floor((y - y0_) / cell_)), 0,
                            ny_ - 1);
  double best = background_;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::int32_t best_idx = -1;
  for (std::int32_t i : cells_[static_cast<std::size_t>(iy) * nx_ + ix]) {
    const Disk& dk = disks_[static_cast<std::size_t>(i)];
    const double dx = x - dk.cx, dy = y - dk.cy;
    const double d2 = dx * dx + dy * dy;
    if (d2 > dk.radius * dk.radius) continue;
    // nearest center wins, ties by lowest index
    if (d2 < best_d2 || (d2 == best_d2 && i < best_idx)) {
      best_d2 = d2;
      best_idx = i;
      best = dk.potential;
    }
  }
  return best;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PatchMap generate_homogeneous(const Geometry& geom, double r0, double v0,
                              double jitter, std::uint64_t seed) {
  geom.validate();
  if (!(r0 > 0.0) || !(r0 < geom.Rm))
    throw std::invalid_argument(
        "generate_homogeneous: need 0 < r0 < Rm (plate holds < 1 patch ring)");
  if (!(v0 > 0.0))
    throw std::invalid_argument("generate_homogeneous: v0 must be positive");
  if (!(jitter >= 0.0) || !(jitter <= 0.5))
    throw std::invalid_argument("generate_homogeneous: jitter in [0, 0.5]");

  const double pitch = 2.0 * r0;
  const double row = std::sqrt(3.0) / 2.0 * pitch;
  const int jmax = static_cast<int>(std::ceil(geom.Rm / row)) + 1;
  const int imax = static_cast<int>(std::ceil(geom.Rm / pitch)) + 1;

  std::mt19937_64 rng(seed);
  std::vector<Disk> disks;
  for (int j = -jmax; j <= jmax; ++j) {
    for (int i = -imax; i <= imax; ++i) {
      const double cx = i * pitch + (std::abs(j) % 2) * pitch / 2.0;
      const double cy = j * row;
      if (std::hypot(cx, cy) > geom.Rm) continue;
      const double ang = kTwoPi * uniform01(rng);
      const double mag = jitter * pitch * uniform01(rng);
      const double sign = uniform01(rng) < 0.5 ? 1.0 : -1.0;
      disks.push_back({cx + mag * std::cos(ang), cy + mag * std::sin(ang), r0,
                       sign * v0});
    }
  }
  return PatchMap(geom, 0.0, std::move(disks), r0, v0, seed);
}

PatchMap generate_single_patch(const Geometry& geom, double r0, double v0,
                               double cx, double cy) {
  geom.validate();
  if (!(r0 > 0.0) || !(r0 <= geom.Rm))
    throw std::invalid_argument("generate_single_patch: need 0 < r0 <= Rm");
  return PatchMap(geom, 0.0, {{cx, cy, r0, v0}}, r0, v0);
}

double ring_average(const PatchMap& map, double r, int n_phi) {
  if (n_phi < 8) throw std::invalid_argument("ring_average: n_phi >= 8");
  if (!(r >= 0.0) || r > map.geometry().Rm * (1.0 + 1e-12))
    throw std::domain_error("ring_average: r outside [0, Rm]");
  if (r == 0.0) return map.potential_at(0.0, 0.0);
  const double rr = std::min(r, map.geometry().Rm);
  double sum = 0.0;
  for (int k = 0; k < n_phi; ++k) {
    const double phi = kTwoPi * k / n_phi;
    sum += map.potential_at(rr * std::cos(phi), rr * std::sin(phi));
  }
  return sum / n_phi;
}

int auto_angular_samples(const PatchMap& map, double r) {
  const double r0 = map.r0_nominal();
  if (!(r0 > 0.0) || r <= 0.0) return 64;
  return std::max(64, static_cast<int>(std::ceil(8.0 * kTwoPi * r / (2.0 * r0))));
}

RingMoments ring_moments(const PatchMap& map, double r) {
  const Geometry& g = map.geometry();
  if (!(r >= 0.0) || r > g.Rm * (1.0 + 1e-12))
    throw std::domain_error("ring_moments: r outside [0, Rm]");
  if (r == 0.0) {
    const double v = map.potential_at(0.0, 0.0);
    return {v, v * v};
  }
  const double rr = std::min(r, g.Rm);
  const double bg = map.background();

  struct Arc {
    double theta, alpha;  // center angle, half width (alpha = pi => full ring)
    std::size_t idx;
    bool full;
  };
  std::vector<Arc> arcs;
  const auto& disks = map.disks();
  for (std::size_t i = 0; i < disks.size(); ++i) {
    const Disk& dk = disks[i];
    const double c = std::hypot(dk.cx, dk.cy);
    if (std::abs(c - rr) > dk.radius) continue;  // ring misses the disk
    if (c + rr <= dk.radius) {
      arcs.push_back({0.0, 3.2, i, true});  // disk contains the whole ring
      continue;
    }
    const double cosa =
        (rr * rr + c * c - dk.radius * dk.radius) / (2.0 * rr * c);
    const double alpha = std::acos(std::clamp(cosa, -1.0, 1.0));
    arcs.push_back({std::atan2(dk.cy, dk.cx), alpha, i, false});
  }
  if (arcs.empty()) return {bg, bg * bg};

  std::vector<double> cuts;
  std::vector<Arc> partial;
  std::vector<Arc> full;
  for (const Arc& a : arcs) {
    if (a.full) {
      full.push_back(a);
      continue;
    }
    partial.push_back(a);
    cuts.push_back(wrap_angle(a.theta - a.alpha));
    cuts.push_back(wrap_angle(a.theta + a.alpha));
  }

  // equidistance angles for overlapping pairs (nearest-center boundaries):
  // on |x| = rr, |x - ca| = |x - cb| reduces to
  // rr |cb - ca| cos(phi - base) = (|cb|^2 - |ca|^2) / 2
  auto add_bisector = [&](std::size_t ia, std::size_t ib) {
    const Disk& da = disks[ia];
    const Disk& db = disks[ib];
    const double dx = db.cx - da.cx, dy = db.cy - da.cy;
    const double dn = std::hypot(dx, dy);
    if (dn < 1e-300) return;
    const double c = (db.cx * db.cx + db.cy * db.cy - da.cx * da.cx -
                      da.cy * da.cy) /
                     2.0;
    if (std::abs(c) > rr * dn) return;  // one disk center always closer
    const double base = std::atan2(dy, dx);
    const double delta = std::acos(std::clamp(c / (rr * dn), -1.0, 1.0));
    cuts.push_back(wrap_angle(base + delta));
    cuts.push_back(wrap_angle(base - delta));
  };
  for (std::size_t i = 0; i < full.size(); ++i) {
    for (std::size_t j = i + 1; j < full.size(); ++j)
      add_bisector(full[i].idx, full[j].idx);
    for (const Arc& b : partial) add_bisector(full[i].idx, b.idx);
  }
  std::sort(partial.begin(), partial.end(),
            [](const Arc& a, const Arc& b) { return a.theta < b.theta; });
  double alpha_max = 0.0;
  for (const Arc& a : partial) alpha_max = std::max(alpha_max, a.alpha);
  const std::size_t np = partial.size();
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t step = 1; step < np; ++step) {
      const std::size_t j = (i + step) % np;
      double gap = partial[j].theta - partial[i].theta;
      if (gap < 0.0) gap += kTwoPi;
      gap = std::min(gap, kTwoPi - gap);
      if (gap > partial[i].alpha + alpha_max) break;
      if (gap <= partial[i].alpha + partial[j].alpha)
        add_bisector(partial[i].idx, partial[j].idx);
    }
  }
  if (cuts.empty()) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());

  double sum = 0.0, sum_sq = 0.0;
  const std::size_t n = cuts.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = cuts[k];
    const double hi = (k + 1 < n) ? cuts[k + 1] : cuts[0] + kTwoPi;
    const double w = hi - lo;
    if (w <= 0.0) continue;
    const double mid = lo + w / 2.0;
    const double v = map.potential_at(rr * std::cos(mid), rr * std::sin(mid));
    sum += v * w;
    sum_sq += v * v * w;
  }
  return {sum / kTwoPi, sum_sq / kTwoPi};
}

void RadialGridSpec::validate() const {
  if (nodes_per_decade < 4)
    throw std::invalid_argument(
        "RadialGridSpec: fewer than 4 radial nodes per decade");
  if (!(d_min > 0.0))
    throw std::invalid_argument("RadialGridSpec: d_min must be positive");
}

std::vector<double> radial_grid(const PatchMap& map,
                                const RadialGridSpec& spec) {
  spec.validate();
  const Geometry& g = map.geometry();
  double r_min = std::sqrt(2.0 * g.R * spec.d_min);
  if (map.r0_nominal() > 0.0) r_min = std::min(r_min, map.r0_nominal());
  r_min /= 10.0;
  r_min = std::min(r_min, g.Rm / 10.0);

  const double decades = std::log10(g.Rm / r_min);
  const int n = static_cast<int>(std::ceil(decades * spec.nodes_per_decade)) + 1;
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(n) + 2 * map.disks().size() + 2);
  const double ratio = std::log(g.Rm / r_min);
  for (int k = 0; k < n; ++k)
    nodes.push_back(r_min * std::exp(ratio * k / (n - 1)));
  nodes.back() = g.Rm;

  if (spec.edge_breakpoints) {
    for (const Disk& dk : map.disks()) {
      const double c = std::hypot(dk.cx, dk.cy);
      for (double re : {c - dk.radius, c + dk.radius}) {
        if (re <= r_min || re >= g.Rm) continue;
        nodes.push_back(re * (1.0 - 1e-9));
        nodes.push_back(re * (1.0 + 1e-9));
      }
    }
  }
  nodes.push_back(0.0);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

RadialProfile radial_profile(const PatchMap& map, const RadialGridSpec& spec) {
  RadialProfile p;
  p.r_nodes = radial_grid(map, spec);
  p.values.reserve(p.r_nodes.size());
  for (double r : p.r_nodes) p.values.push_back(ring_moments(map, r).mean);
  return p;
}

namespace {

template <class F>
double adapt(const F& f, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
  const double m = (a + b) / 2.0;
  const double fl = f((a + m) / 2.0);
  const double fr = f((m + b) / 2.0);
  const double left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) < 15.0 * tol)
    return left + right + err / 15.0;
  return adapt(f, a, m, fa, fl, fm, left, tol / 2.0, depth - 1) +
         adapt(f, m, b, fm, fr, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double area_average(const PatchMap& map, double abs_tol) {
  const Geometry& g = map.geometry();
  // split at tangency radii so each piece is smooth inside
  std::vector<double> edges{0.0, g.Rm};
  for (const Disk& dk : map.disks()) {
    const double c = std::hypot(dk.cx, dk.cy);
    for (double re : {c - dk.radius, c + dk.radius})
      if (re > 0.0 && re < g.Rm) edges.push_back(re);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const double s_total = g.Rm * g.Rm / 2.0;
  const double half_pi = std::acos(0.0);
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double ra = edges[k], rb = edges[k + 1];
    // r = ra + (rb-ra) sin^2(t): the Jacobian vanishes at both ends, soaking
    // up the sqrt kinks left by patch circles tangent to the sampling ring
    auto g_of = [&](double t) {
      const double st = std::sin(t);
      const double r = ra + (rb - ra) * st * st;
      return ring_moments(map, r).mean * r * (rb - ra) * std::sin(2.0 * t);
    };
    const double fm = g_of(half_pi / 2.0);
    const double whole = half_pi / 6.0 * (4.0 * fm);
    const double seg_tol = abs_tol * (rb * rb - ra * ra) / 2.0;
    integral += adapt(g_of, 0.0, half_pi, 0.0, fm, 0.0, whole, seg_tol, 30);
  }
  return integral / s_total;
}

double area_average_analytic(const PatchMap& map) {
  const Geometry& g = map.geometry();
  double avg = map.background();
  for (const Disk& dk : map.disks()) {
    const double frac = (dk.radius / g.Rm) * (dk.radius / g.Rm);
    avg += (dk.potential - map.background()) * frac;
  }
  return avg;
}

RingRmsResult ring_rms_ensemble(const Geometry& geom, double r0, double v0,
                                double jitter, int n_real,
                                std::uint64_t master_seed,
                                const std::vector<double>& r_nodes) {
  if (n_real < 50)
    throw std::invalid_argument("ring_rms_ensemble: need n_real >= 50");
  for (double r : r_nodes)
    if (!(r >= 2.0 * r0) || !(r <= geom.Rm))
      throw std::invalid_argument(
          "ring_rms_ensemble: r_nodes must lie in [2 r0, Rm]");

  RingRmsResult out;
  out.r = r_nodes;
  std::vector<double> sum_sq(r_nodes.size(), 0.0);
  for (int i = 0; i < n_real; ++i) {
    const PatchMap map = generate_homogeneous(
        geom, r0, v0, jitter, mix_seed(master_seed, static_cast<std::uint64_t>(i)));
    for (std::size_t k = 0; k < r_nodes.size(); ++k) {
      const double m = ring_moments(map, r_nodes[k]).mean;
      sum_sq[k] += m * m;
    }
  }
  out.s.reserve(r_nodes.size());
  for (double q : sum_sq) out.s.push_back(std::sqrt(q / n_real));

  // log-log OLS slope over [5 r0, Rm]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < r_nodes.size(); ++k) {
    if (r_nodes[k] < 5.0 * r0 || out.s[k] <= 0.0) continue;
    const double x = std::log(r_nodes[k]);
    const double y = std::log(out.s[k]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  out.loglog_slope =
      (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return out;
}

}  // namespace patchpot
