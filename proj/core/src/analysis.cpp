#include "patchpot/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace patchpot {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::close: return "close";
    case Regime::intermediate: return "intermediate";
    case Regime::far: return "far";
  }
  return "?";
}

Regime classify_regime(const Geometry& geom, double r0, double d) {
  geom.validate();
  if (!(d > 0.0)) throw std::domain_error("classify_regime: d must be positive");
  const double d1 = r0 * r0 / (2.0 * geom.R);
  const double d2 = geom.edge_gap_term();
  if (d > d2) return Regime::far;
  if (d < d1 && std::abs(std::log(d)) > std::abs(std::log(d2)))
    return Regime::close;
  return Regime::intermediate;
}

std::vector<double> log_spaced(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(lo < hi))
    throw std::invalid_argument("log_spaced: need 0 < lo < hi");
  if (per_decade < 1) throw std::invalid_argument("log_spaced: per_decade >= 1");
  const double decades = std::log10(hi / lo);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo);
  for (int k = 0; k < n; ++k) grid[k] = lo * std::exp(step * k / (n - 1));
  grid.back() = hi;
  return grid;
}

namespace {
void check_d_grid(const std::vector<double>& d_grid) {
  if (d_grid.empty()) throw std::invalid_argument("empty distance grid");
  for (double d : d_grid)
    if (!(d > 0.0)) throw std::domain_error("distance grid: d must be positive");
  for (std::size_t k = 0; k + 1 < d_grid.size(); ++k)
    if (!(d_grid[k] < d_grid[k + 1]))
      throw std::invalid_argument("distance grid must be strictly increasing");
  if (d_grid.size() >= 2) {
    const double decades = std::log10(d_grid.back() / d_grid.front());
    if (decades > 0.0 &&
        static_cast<double>(d_grid.size() - 1) / decades < 8.0 - 1e-9)
      throw std::invalid_argument(
          "distance grid too coarse: need >= 8 points per decade");
  }
}
}  // namespace

VmCurve sweep(const PatchMap& map, const std::vector<double>& d_grid,
              const QuadratureSpec& spec) {
  check_d_grid(d_grid);
  const GapSamples samples(map, spec);
  const RadialProfile profile = samples.profile();
  VmCurve curve;
  curve.geom = map.geometry();
  curve.points.reserve(d_grid.size());
  const double r0 = map.r0_nominal() > 0.0 ? map.r0_nominal() : map.geometry().Rm;
  for (double d : d_grid) {
    VmCurvePoint p;
    p.d = d;
    p.vm_energy = samples.vm_energy(d);
    p.vm_force = samples.vm_force(d);
    p.vm_analytic = vm_analytic(profile, map.geometry(), d);
    p.validity = validity(map.geometry(), d, r0);
    p.regime = classify_regime(map.geometry(), r0, d);
    curve.points.push_back(p);
  }
  return curve;
}

LogFit fit_points(const std::vector<std::pair<double, double>>& data,
                  double d_lo, double d_hi) {
  if (!(d_lo < d_hi)) throw std::invalid_argument("fit window: d_lo < d_hi");
  std::vector<std::pair<double, double>> sel;
  for (const auto& [d, v] : data)
    if (d >= d_lo * (1.0 - 1e-12) && d <= d_hi * (1.0 + 1e-12))
      sel.emplace_back(std::log(d), v);
  double distinct = 0;
  for (std::size_t k = 0; k < sel.size(); ++k)
    if (k == 0 || sel[k].first != sel[k - 1].first) ++distinct;
  if (sel.size() < 2 || distinct < 2)
    throw std::runtime_error("fit_log: fewer than 2 distinct d in window");

  const double n = static_cast<double>(sel.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : sel) { sx += x; sy += y; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : sel) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  LogFit fit;
  fit.b = sxy / sxx;
  fit.a = my - fit.b * mx;
  fit.d_lo = d_lo;
  fit.d_hi = d_hi;
  fit.n = static_cast<int>(sel.size());
  double ssr = 0, sst = 0;
  for (const auto& [x, y] : sel) {
    const double e = y - (fit.a + fit.b * x);
    ssr += e * e;
    sst += (y - my) * (y - my);
  }
  fit.residual_rms = std::sqrt(ssr / n);
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 1.0;
  fit.b_stderr = sel.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  return fit;
}

LogFit fit_log(const VmCurve& curve, double d_lo, double d_hi,
               VmVariant variant) {
  std::vector<std::pair<double, double>> data;
  data.reserve(curve.points.size());
  for (const VmCurvePoint& p : curve.points) {
    double v = p.vm_energy;
    if (variant == VmVariant::force) v = p.vm_force;
    if (variant == VmVariant::analytic) v = p.vm_analytic;
    data.emplace_back(p.d, v);
  }
  return fit_points(data, d_lo, d_hi);
}

LogFit fit_external(const std::vector<std::pair<double, double>>& data,
                    double d_lo, double d_hi) {
  return fit_points(data, d_lo, d_hi);
}

RegimePrediction predict_intermediate(const RadialProfile& profile,
                                      const Geometry& geom, double r0) {
  geom.validate();
  if (!(r0 > 0.0) || !(r0 < geom.Rm))
    throw std::invalid_argument("predict_intermediate: need 0 < r0 < Rm");
  RegimePrediction pred;
  pred.d1 = r0 * r0 / (2.0 * geom.R);
  pred.d2 = geom.edge_gap_term();
  if (std::abs(pred.d2 - 1.0) < 0.01)
    throw std::invalid_argument(
        "predict_intermediate: ln(Rm^2/2R) ill-conditioned (within 1% of 1 m)");
  pred.L = std::log(pred.d2);
  const double d_ref = std::sqrt(pred.d1 * pred.d2);
  pred.q0 = compute_Q(profile, geom, d_ref) / pred.L;
  pred.a_pred = profile.values.back() + pred.q0;
  pred.b_pred = (profile.values.back() + pred.q0 - profile.values.front()) / pred.L;
  return pred;
}

std::pair<double, double> default_fit_window(const Geometry& geom, double r0) {
  const double d1 = r0 * r0 / (2.0 * geom.R);
  return {10.0 * d1, geom.edge_gap_term() / 10.0};
}

EnsembleStats ensemble_vm(const Geometry& geom, double r0, double v0,
                          double jitter, int n_real,
                          std::uint64_t master_seed,
                          const std::vector<double>& d_grid,
                          const QuadratureSpec& spec, int threads) {
  if (n_real < 1)
    throw std::invalid_argument("ensemble_vm: need n_real >= 1");
  check_d_grid(d_grid);
  threads = std::clamp(threads, 1, n_real);

  const std::size_t nd = d_grid.size();
  std::vector<std::vector<double>> e(static_cast<std::size_t>(n_real)),
      f(static_cast<std::size_t>(n_real));
  std::vector<LogFit> fits(static_cast<std::size_t>(n_real));
  const auto [w_lo, w_hi] = default_fit_window(geom, r0);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_real) return;
      const PatchMap map = generate_homogeneous(
          geom, r0, v0, jitter, mix_seed(master_seed, static_cast<std::uint64_t>(i)));
      const GapSamples samples(map, spec);
      auto& ei = e[static_cast<std::size_t>(i)];
      auto& fi = f[static_cast<std::size_t>(i)];
      ei.reserve(nd);
      fi.reserve(nd);
      std::vector<std::pair<double, double>> pts;
      pts.reserve(nd);
      for (double d : d_grid) {
        ei.push_back(samples.vm_energy(d));
        fi.push_back(samples.vm_force(d));
        pts.emplace_back(d, ei.back());
      }
      try {
        fits[static_cast<std::size_t>(i)] = fit_points(pts, w_lo, w_hi);
      } catch (const std::exception&) {
        fits[static_cast<std::size_t>(i)] = LogFit{};  // window misses the grid
      }
    }
  };
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto guarded = [&]() {
    try {
      worker();
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next.store(n_real);  // stop handing out work
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(guarded);
  guarded();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  EnsembleStats st;
  st.d = d_grid;
  st.n_real = n_real;
  st.fits = std::move(fits);
  const double n = static_cast<double>(n_real);
  for (std::size_t k = 0; k < nd; ++k) {
    double se = 0, sf = 0;
    for (int i = 0; i < n_real; ++i) {
      se += e[static_cast<std::size_t>(i)][k];
      sf += f[static_cast<std::size_t>(i)][k];
    }
    const double me = se / n, mf = sf / n;
    double ve = 0, vf = 0, vd = 0;
    for (int i = 0; i < n_real; ++i) {
      const double de = e[static_cast<std::size_t>(i)][k] - me;
      const double df = f[static_cast<std::size_t>(i)][k] - mf;
      ve += de * de;
      vf += df * df;
      const double dd = (f[static_cast<std::size_t>(i)][k] -
                         e[static_cast<std::size_t>(i)][k]) -
                        (mf - me);
      vd += dd * dd;
    }
    st.mean_energy.push_back(me);
    st.mean_force.push_back(mf);
    st.mean_diff.push_back(mf - me);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    st.std_energy.push_back(n_real > 1 ? std::sqrt(ve / (n - 1.0)) : nan);
    st.std_force.push_back(n_real > 1 ? std::sqrt(vf / (n - 1.0)) : nan);
    st.std_diff.push_back(n_real > 1 ? std::sqrt(vd / (n - 1.0)) : nan);
  }

  // paired statistic: per-realization mean of (vm_force - vm_energy) over
  // the default intermediate window
  bool window_hit = false;
  for (double d : d_grid)
    if (d >= w_lo && d <= w_hi) window_hit = true;
  std::vector<double> paired;
  paired.reserve(static_cast<std::size_t>(n_real));
  for (int i = 0; i < n_real; ++i) {
    double acc = 0;
    int cnt = 0;
    for (std::size_t k = 0; k < nd; ++k) {
      if (window_hit && (d_grid[k] < w_lo || d_grid[k] > w_hi)) continue;
      acc += f[static_cast<std::size_t>(i)][k] - e[static_cast<std::size_t>(i)][k];
      ++cnt;
    }
    if (cnt > 0) paired.push_back(acc / cnt);
  }
  if (!paired.empty()) {
    double s = 0;
    for (double x : paired) s += x;
    st.diff_mean = s / static_cast<double>(paired.size());
    double v = 0;
    for (double x : paired) v += (x - st.diff_mean) * (x - st.diff_mean);
    if (paired.size() > 1)
      st.diff_stderr = std::sqrt(v / (static_cast<double>(paired.size()) - 1.0) /
                                 static_cast<double>(paired.size()));
  }
  return st;
}

}  // namespace patchpot
