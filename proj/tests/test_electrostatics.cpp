#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "patchpot/electrostatics.hpp"

using namespace patchpot;

namespace {
const Geometry kRef{0.15, 0.015};
constexpr double kPi = 3.14159265358979323846;

PatchMap uniform_map(double v) {
  return PatchMap(kRef, v, {}, 5e-4, 0.1);
}
}  // namespace

TEST_CASE("QuadratureSpec::validate") {
  QuadratureSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.radial_nodes_per_decade = 23;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.radial_nodes_per_decade = 24;
  spec.min_angular_samples = 63;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.min_angular_samples = 64;
  CHECK_NOTHROW(spec.validate());
  spec.d_min = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("uniform gap energy and force match the closed forms") {
  const double v = 0.0, va = 1.0;  // plain capacitor at voltage va
  PatchMap map = uniform_map(v);
  QuadratureSpec spec;
  GapSamples samples(map, spec);
  const double d2 = kRef.edge_gap_term();
  for (double d : {1e-7, 1e-5, 7.5e-4, 1e-2}) {
    const double u_ref =
        kEps0 * kPi * kRef.R * std::log1p(d2 / d) * va * va;
    const double f_ref =
        kEps0 * kPi * kRef.R * va * va * d2 / (d * (d + d2));
    CHECK(samples.free_energy(d, va) == doctest::Approx(u_ref).epsilon(1e-12));
    CHECK(samples.force(d, va) == doctest::Approx(f_ref).epsilon(1e-12));
  }
  // frozen values at d = d2 = 7.5e-4
  CHECK(samples.free_energy(7.5e-4, 1.0) ==
        doctest::Approx(2.892113e-12).epsilon(1e-6));
  CHECK(samples.force(7.5e-4, 1.0) ==
        doctest::Approx(2.781625e-9).epsilon(1e-6));
}

TEST_CASE("force is the exact distance derivative of the energy") {
  PatchMap map = generate_homogeneous(kRef, 5e-4, 0.1, 0.25, 3);
  QuadratureSpec spec;
  spec.radial_nodes_per_decade = 48;
  GapSamples samples(map, spec);
  const double d = 1e-5, va = 0.03, h = d * 1e-5;
  const double fd = (samples.free_energy(d - h, va) -
                     samples.free_energy(d + h, va)) /
                    (2.0 * h);
  CHECK(samples.force(d, va) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("uniform potential shifts the minimizers exactly") {
  PatchMap map = uniform_map(0.07);
  QuadratureSpec spec;
  GapSamples samples(map, spec);
  for (double d : {1e-6, 1e-4}) {
    CHECK(samples.vm_energy(d) == doctest::Approx(0.07).epsilon(1e-13));
    CHECK(std::abs(samples.vm_force(d) - samples.vm_energy(d)) < 1e-12);
  }
}

TEST_CASE("single centered disk matches the closed-form minimizer") {
  const double r0 = 1e-3, v0 = 0.1;
  PatchMap map = generate_single_patch(kRef, r0, v0);
  QuadratureSpec spec;
  GapSamples samples(map, spec);
  const double d1 = r0 * r0 / (2.0 * kRef.R);
  const double d2 = kRef.edge_gap_term();
  for (double d : {1e-8, 1e-6, 1e-4, 1e-2}) {
    const double vm_ref = v0 * std::log1p(d1 / d) / std::log1p(d2 / d);
    CHECK(samples.vm_energy(d) == doctest::Approx(vm_ref).epsilon(1e-9));
    const double a1 = d1 / (d * (d + d1));
    const double a2 = d2 / (d * (d + d2));
    CHECK(samples.vm_force(d) == doctest::Approx(v0 * a1 / a2).epsilon(1e-9));
  }
}

TEST_CASE("vm_scan refines to the closed-form minimizer") {
  PatchMap map = generate_homogeneous(kRef, 5e-4, 0.1, 0.25, 11);
  QuadratureSpec spec;
  spec.radial_nodes_per_decade = 48;
  GapSamples samples(map, spec);
  for (double d : {1e-6, 1e-5, 1e-4}) {
    const double direct = samples.vm_energy(d);
    const double scanned = vm_scan(samples, d, -0.2, 0.2, 2000);
    CHECK(std::abs(scanned - direct) < 1e-12);
  }
  CHECK_THROWS_AS(vm_scan(samples, 1e-5, 0.1, 0.2, 1000), std::runtime_error);
  CHECK_THROWS_AS(vm_scan(samples, 1e-5, -0.2, 0.2, 999),
                  std::invalid_argument);
}

TEST_CASE("compute_Q closed form for a step profile") {
  // V = +1 inside r=a, -1 outside: Q(d) = 2 ln(d + a^2/2R)
  const double a = std::sqrt(2.0 * kRef.R * 1e-6);  // a^2/2R = 1e-6
  PatchMap map(kRef, -1.0, {{0.0, 0.0, a, 1.0}}, a, 1.0);
  RadialGridSpec gspec;
  RadialProfile prof = radial_profile(map, gspec);
  const double d = 1e-6;
  const double q_ref = 2.0 * std::log(d + 1e-6);  // = 2 ln 2e-6
  CHECK(compute_Q(prof, kRef, d) == doctest::Approx(q_ref).epsilon(1e-9));
  CHECK(compute_Q(prof, kRef, d) == doctest::Approx(-26.2447).epsilon(1e-4));
}

TEST_CASE("vm_analytic reproduces the two-zone closed form") {
  const double a = std::sqrt(2.0 * kRef.R * 1e-6);
  PatchMap map(kRef, -1.0, {{0.0, 0.0, a, 1.0}}, a, 1.0);
  RadialGridSpec gspec;
  RadialProfile prof = radial_profile(map, gspec);
  const double d = 1e-6, d2 = kRef.edge_gap_term();
  const double num = std::log(2.0) - (std::log(d + d2) - std::log(2.0 * d));
  const double den = std::log(d + d2) - std::log(d);
  CHECK(vm_analytic(prof, kRef, d) ==
        doctest::Approx(num / den).epsilon(1e-9));
  CHECK(vm_analytic(prof, kRef, d) == doctest::Approx(-0.79064).epsilon(1e-4));
  // and it agrees with the quadrature minimizer
  QuadratureSpec spec;
  GapSamples samples(map, spec);
  CHECK(samples.vm_energy(d) ==
        doctest::Approx(num / den).epsilon(1e-6));
}

TEST_CASE("free energy is quadratic in va with minimum at vm_energy") {
  PatchMap map = generate_homogeneous(kRef, 5e-4, 0.1, 0.25, 17);
  QuadratureSpec spec;
  spec.radial_nodes_per_decade = 48;
  GapSamples samples(map, spec);
  const double d = 3e-5;
  const double vm = samples.vm_energy(d);
  const double u0 = samples.free_energy(d, vm);
  for (double dv : {-0.05, -0.01, 0.01, 0.05}) {
    CHECK(samples.free_energy(d, vm + dv) > u0);
    // symmetric about the minimum
    CHECK(samples.free_energy(d, vm + dv) ==
          doctest::Approx(samples.free_energy(d, vm - dv)).epsilon(1e-10));
  }
}

TEST_CASE("free functions agree with the GapSamples methods") {
  PatchMap map = generate_homogeneous(kRef, 5e-4, 0.1, 0.25, 23);
  QuadratureSpec spec;
  spec.radial_nodes_per_decade = 48;
  GapSamples samples(map, spec);
  const double d = 2e-5, va = 0.04;
  CHECK(free_energy(map, d, va, spec) == samples.free_energy(d, va));
  CHECK(force(map, d, va, spec) == samples.force(d, va));
  CHECK(vm_energy(map, d, spec) == samples.vm_energy(d));
  CHECK(vm_force(map, d, spec) == samples.vm_force(d));
}
