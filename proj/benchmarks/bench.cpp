#include <benchmark/benchmark.h>

#include "patchpot/analysis.hpp"
#include "patchpot/electrostatics.hpp"
#include "patchpot/patches.hpp"

using namespace patchpot;

namespace {

const Geometry kRef{0.15, 0.015};

PatchMap make_map(double r0) {
  return generate_homogeneous(kRef, r0, 0.1, 0.25, 7);
}

void BM_generate(benchmark::State& state) {
  const double r0 = 1e-4 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    PatchMap map = make_map(r0);
    benchmark::DoNotOptimize(map.disks().size());
  }
}
BENCHMARK(BM_generate)->Arg(5)->Arg(10)->Arg(20);

void BM_ring_moments(benchmark::State& state) {
  PatchMap map = make_map(5e-4);
  const double r = 1e-4 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ring_moments(map, r).mean);
  }
}
BENCHMARK(BM_ring_moments)->Arg(10)->Arg(50)->Arg(140);

void BM_gap_samples_build(benchmark::State& state) {
  PatchMap map = make_map(5e-4);
  QuadratureSpec spec;
  spec.radial_nodes_per_decade = static_cast<int>(state.range(0));
  for (auto _ : state) {
    GapSamples samples(map, spec);
    benchmark::DoNotOptimize(samples.r_nodes().size());
  }
}
BENCHMARK(BM_gap_samples_build)->Arg(24)->Arg(64)->Arg(160);

void BM_vm_energy(benchmark::State& state) {
  PatchMap map = make_map(5e-4);
  QuadratureSpec spec;
  GapSamples samples(map, spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(samples.vm_energy(1e-5));
  }
}
BENCHMARK(BM_vm_energy);

void BM_sweep(benchmark::State& state) {
  PatchMap map = make_map(1e-3);
  QuadratureSpec spec;
  spec.radial_nodes_per_decade = 48;
  const std::vector<double> d_grid = log_spaced(1e-6, 1e-4, 12);
  for (auto _ : state) {
    VmCurve curve = sweep(map, d_grid, spec);
    benchmark::DoNotOptimize(curve.points.size());
  }
}
BENCHMARK(BM_sweep);

void BM_area_average(benchmark::State& state) {
  PatchMap map = make_map(2e-3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(area_average(map, 1e-8));
  }
}
BENCHMARK(BM_area_average);

}  // namespace

BENCHMARK_MAIN();
