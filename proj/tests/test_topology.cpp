// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "coaxres/config.hpp"
#include "coaxres/errors.hpp"
#include "coaxres/topology.hpp"
#include "test_util.hpp"

using namespace coaxres;
using testutil::cnear;

namespace {

// Identical matrices bit-for-bit is too strict after different cascade
// orders; compare within an absolute/relative mix.
void check_matrices_close(const AbcdMatrix& x, const AbcdMatrix& y, double tol) {
  CHECK(cnear(x.a, y.a, tol));
  CHECK(cnear(x.b, y.b, tol));
  CHECK(cnear(x.c, y.c, tol));
  CHECK(cnear(x.d, y.d, tol));
}

BareCableTopology fig1b_bare() {
  // l = 0.9999 m with the fundamental at 4.902 GHz / 41.
  BareCableTopology topo = default_bare_topology();
  topo.resonator.length_m = 0.9999;
  topo.resonator.cap_per_length_f_per_m = 8.364769565491841e-11;
  topo.resonator.internal_q = 1.556e6;
  topo.c_in_f = 3.602e-15;
  return topo;
}

}  // namespace

TEST_CASE("degenerate splice reduces to the bare cable") {
  BareCableTopology bare = default_bare_topology();
  bare.resonator.length_m = 1.0;

  SplicedCableTopology splice;
  splice.launch = bare.launch;
  splice.c_in_f = bare.c_in_f;
  splice.z_out_ohm = bare.z_out_ohm;
  splice.half_a = bare.resonator;
  splice.half_a.length_m = 0.4;
  splice.half_b = bare.resonator;
  splice.half_b.length_m = 0.6;
  splice.join = bare.resonator;
  splice.join.length_m = 0.0;
  splice.r_cont_ohm = 0.0;

  testutil::Rng rng(0x10f01u);
  for (int i = 0; i < 50; ++i) {
    const double f = rng.uniform(1e9, 8e9);
    check_matrices_close(compile(ResonatorTopology{splice}, f),
                         compile(ResonatorTopology{bare}, f), 1e-12);
  }
}

TEST_CASE("degenerate chip attach reduces to the bare cable") {
  BareCableTopology bare = default_bare_topology();

  ChipCableTopology chip;
  chip.launch = bare.launch;
  chip.c_in_f = bare.c_in_f;
  chip.z_out_ohm = bare.z_out_ohm;
  chip.cpw = bare.resonator;
  chip.cpw.length_m = 0.0;
  chip.cable = bare.resonator;
  chip.r_cont_ohm = 0.0;
  chip.r_shunt_ohm = std::numeric_limits<double>::infinity();

  testutil::Rng rng(0x10f02u);
  for (int i = 0; i < 50; ++i) {
    const double f = rng.uniform(1e9, 8e9);
    check_matrices_close(compile(ResonatorTopology{chip}, f),
                         compile(ResonatorTopology{bare}, f), 1e-12);
  }
}

TEST_CASE("n = 41 mode sits at 4.902 GHz") {
  const ResonatorTopology topo{fig1b_bare()};
  const double fsr = analytic_fsr_hz(topo);
  CHECK(testutil::rel_err(41.0 * fsr, 4.902e9) < 1e-9);

  // The loaded resonance is pulled slightly below n * FSR by the coupling
  // capacitor (about Z0/|Z_C| / (n*pi) fractionally, ~210 kHz here).
  const auto grid = linspace(4.902e9 - 6e5, 4.902e9 + 6e5, 48001);
  const SweepResult sr = sweep(topo, grid, PortSpec{});
  double best_f = 0.0, best = 1e9;
  for (std::size_t i = 0; i < sr.size(); ++i) {
    if (std::abs(sr.s11[i]) < best) {
      best = std::abs(sr.s11[i]);
      best_f = sr.freqs_hz[i];
    }
  }
  CHECK(best < 0.6);                              // a real reflection dip
  CHECK(std::abs(best_f - 4.902e9) < 3.0e5);
}

TEST_CASE("lossless open-ended cable reflects everything") {
  // For exact unitarity the far end must be reflective as well as large:
  // a purely real 1e9 ohm termination is a (weak) resistor and absorbs a
  // measurable fraction on resonance.
  BareCableTopology topo = default_bare_topology();
  topo.resonator.internal_q = std::numeric_limits<double>::infinity();
  topo.launch.internal_q = std::numeric_limits<double>::infinity();
  topo.z_out_ohm = Complex{0.0, 1e9};

  const auto grid = linspace(3e9, 5.5e9, 20001);
  const SweepResult sr = sweep(ResonatorTopology{topo}, grid, PortSpec{});
  for (const Complex& v : sr.s11) {
    CHECK(std::abs(std::abs(v) - 1.0) < 1e-6);
  }
}

TEST_CASE("sweep is deterministic") {
  const ResonatorTopology topo{default_splice_topology()};
  const auto grid = linspace(3e9, 3.1e9, 2001);
  const SweepResult a = sweep(topo, grid, PortSpec{});
  const SweepResult b = sweep(topo, grid, PortSpec{});
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.s11.data(), b.s11.data(),
                    a.size() * sizeof(Complex)) == 0);
}

TEST_CASE("passivity of random assemblies") {
  testutil::Rng rng(0xbeefcafeu);
  for (int trial = 0; trial < 60; ++trial) {
    const ResonatorTopology topo = testutil::random_topology(rng);
    const double f_lo = rng.uniform(5e8, 2e9);
    const auto grid = linspace(f_lo, f_lo + rng.uniform(1e9, 4e9), 101);
    const SweepResult sr = sweep(topo, grid, PortSpec{});
    for (const Complex& v : sr.s11) {
      CHECK(std::abs(v) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("internal state boundary conditions on a half-wave mode") {
  // Weakly coupled, effectively open at both ends.
  BareCableTopology topo = default_bare_topology();
  topo.resonator.internal_q = std::numeric_limits<double>::infinity();
  topo.launch.internal_q = std::numeric_limits<double>::infinity();
  topo.c_in_f = 2e-16;
  topo.z_out_ohm = Complex{1e12, 0.0};
  const ResonatorTopology t{topo};

  const double f1 = analytic_fsr_hz(t);  // fundamental
  const double L = resonator_length_m(t);

  double max_current = 0.0;
  double mid_current = 0.0;
  const int points = 200;
  for (int i = 0; i <= points; ++i) {
    const double x = L * i / points;
    const double amp = std::abs(internal_state(t, f1, x).current_a);
    max_current = std::max(max_current, amp);
    if (i == points / 2) mid_current = amp;
  }
  const double end_a = std::abs(internal_state(t, f1, 0.0).current_a);
  const double end_b = std::abs(internal_state(t, f1, L).current_a);

  CHECK(end_a <= 1e-3 * max_current);
  CHECK(end_b <= 1e-3 * max_current);
  CHECK(mid_current > 0.99 * max_current);  // fundamental peaks mid-line

  CHECK_THROWS_AS(internal_state(t, f1, -0.1), ValidationError);
  CHECK_THROWS_AS(internal_state(t, f1, L + 0.1), ValidationError);
}

TEST_CASE("splice interface current distinguishes the mode families") {
  const ResonatorTopology topo{default_splice_topology()};
  const double fsr = analytic_fsr_hz(topo);

  // Even longitudinal orders put a current node at the mid-cable join,
  // odd orders an antinode.
  for (int n : {26, 30, 40, 44}) {
    const auto cls = classify_interface_current(topo, n * fsr);
    REQUIRE(cls.has_value());
    CHECK(cls->ratio < 0.25);
    CHECK(cls->cls == CurrentClass::node);
  }
  for (int n : {25, 31, 41, 45}) {
    const auto cls = classify_interface_current(topo, n * fsr);
    REQUIRE(cls.has_value());
    CHECK(cls->ratio > 0.75);
    CHECK(cls->cls == CurrentClass::antinode);
  }

  CHECK(!classify_interface_current(ResonatorTopology{default_bare_topology()},
                                    5e9)
             .has_value());
}

TEST_CASE("geometry helpers") {
  const SplicedCableTopology splice = default_splice_topology();
  const ResonatorTopology t{splice};
  CHECK(resonator_length_m(t) == doctest::Approx(1.008));
  CHECK(interface_position_m(t).value() == doctest::Approx(0.504));
  CHECK(analytic_fsr_hz(t) == doctest::Approx(1.2075e8).epsilon(1e-12));

  const ChipCableTopology chip = default_chip_topology(false);
  const ResonatorTopology tc{chip};
  CHECK(interface_position_m(tc).value() ==
        doctest::Approx(chip.cpw.length_m));
  CHECK(!interface_position_m(ResonatorTopology{default_bare_topology()})
             .has_value());

  // The uniform-line equivalent preserves the mode spacing.
  CHECK(analytic_fsr_hz(ResonatorTopology{bare_equivalent(t)}) ==
        doctest::Approx(analytic_fsr_hz(t)).epsilon(1e-12));
  CHECK(analytic_fsr_hz(ResonatorTopology{bare_equivalent(tc)}) ==
        doctest::Approx(analytic_fsr_hz(tc)).epsilon(1e-12));
}

TEST_CASE("with_fit_parameters") {
  const ResonatorTopology splice{default_splice_topology()};
  const ResonatorTopology scaled = with_fit_parameters(splice, 1.108, 4e-15, 2e6);
  const auto& sp = std::get<SplicedCableTopology>(scaled);
  CHECK(resonator_length_m(scaled) == doctest::Approx(1.108));
  CHECK(sp.join.length_m == doctest::Approx(8e-3));  // join length pinned
  CHECK(sp.half_a.length_m == doctest::Approx(sp.half_b.length_m));
  CHECK(sp.half_a.internal_q == doctest::Approx(2e6));
  CHECK(sp.c_in_f == doctest::Approx(4e-15));

  CHECK_THROWS_AS(with_fit_parameters(splice, 5e-3, 4e-15, 2e6),
                  ValidationError);
}

TEST_CASE("fingerprint distinguishes parameter changes") {
  SplicedCableTopology a = default_splice_topology();
  SplicedCableTopology b = a;
  b.r_cont_ohm *= 2.0;
  CHECK(topology_fingerprint(ResonatorTopology{a}) !=
        topology_fingerprint(ResonatorTopology{b}));
  CHECK(topology_fingerprint(ResonatorTopology{a}) ==
        topology_fingerprint(ResonatorTopology{a}));
}

TEST_CASE("topology validation") {
  BareCableTopology bad = default_bare_topology();
  bad.c_in_f = 0.0;
  CHECK_THROWS_AS(validate(ResonatorTopology{bad}), ValidationError);

  ChipCableTopology chip = default_chip_topology(true);
  chip.r_shunt_ohm = -1.0;
  CHECK_THROWS_AS(validate(ResonatorTopology{chip}), ValidationError);

  SplicedCableTopology sp = default_splice_topology();
  sp.r_cont_ohm = -1e-4;
  CHECK_THROWS_AS(validate(ResonatorTopology{sp}), ValidationError);
}
