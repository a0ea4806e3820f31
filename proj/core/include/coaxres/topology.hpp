// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_TOPOLOGY_HPP
#define COAXRES_TOPOLOGY_HPP

#include <optional>
#include <string>
#include <variant>

#include "coaxres/abcd.hpp"
#include "coaxres/sweep_result.hpp"

namespace coaxres {

// The three measurable assemblies. Each one compiles, per frequency, to
//   T_launch * C_in-series * T_res * Z_out-series
// where T_res depends on the variant. z_out_ohm defaults to an effectively
// open far end.

inline constexpr Complex kOpenEndOhm{1e9, 0.0};

// Launch line, coupling capacitor, one uniform cable resonator, termination.
struct BareCableTopology {
  TransmissionLineSpec launch;
  double c_in_f = 0.0;
  TransmissionLineSpec resonator;
  Complex z_out_ohm = kOpenEndOhm;
};

// Cable resonator spliced by a short join region; one contact resistance on
// each side of the join.
struct SplicedCableTopology {
  TransmissionLineSpec launch;
  double c_in_f = 0.0;
  TransmissionLineSpec half_a;
  double r_cont_ohm = 0.0;
  TransmissionLineSpec join;
  TransmissionLineSpec half_b;
  Complex z_out_ohm = kOpenEndOhm;
};

// On-chip waveguide joined to the cable through a contact-resistance /
// shunt-resistance tee. The coupling capacitor is the on-chip boundary
// capacitor, so the resonator region is cpw + cable.
struct ChipCableTopology {
  TransmissionLineSpec launch;
  double c_in_f = 0.0;
  TransmissionLineSpec cpw;
  double r_cont_ohm = 0.0;
  double r_shunt_ohm = std::numeric_limits<double>::infinity();
  TransmissionLineSpec cable;
  Complex z_out_ohm = kOpenEndOhm;
};

using ResonatorTopology =
    std::variant<BareCableTopology, SplicedCableTopology, ChipCableTopology>;

void validate(const BareCableTopology& t);
void validate(const SplicedCableTopology& t);
void validate(const ChipCableTopology& t);
void validate(const ResonatorTopology& t);

// "bare", "splice" or "chip".
std::string topology_kind_name(const ResonatorTopology& t);

// Short stable hash of all parameters, for provenance metadata.
std::string topology_fingerprint(const ResonatorTopology& t);

// Full transfer matrix at one frequency.
AbcdMatrix compile(const ResonatorTopology& t, double f_hz);

// S11 on a strictly increasing frequency grid. Deterministic; propagates
// element errors annotated with the offending frequency.
SweepResult sweep(const ResonatorTopology& t, std::span<const double> freqs_hz,
                  const PortSpec& port = {});

// Voltage/current phasors at a position along the resonator region
// (0 = the coupling-capacitor end) for a unit incident voltage wave at the
// reference port. At a position occupied by a lumped element the state just
// after the element is returned.
struct LineState {
  Complex voltage_v;
  Complex current_a;
};
LineState internal_state(const ResonatorTopology& t, double f_hz,
                         double position_m, const PortSpec& port = {});

// Total length of the resonator region (launch excluded).
double resonator_length_m(const ResonatorTopology& t);

// Position of the join centre (splice) or the attach tee (chip) along the
// resonator region; empty for the bare cable.
std::optional<double> interface_position_m(const ResonatorTopology& t);

// Half-wave mode spacing from the summed electrical length of the resonator
// region: c / (2 * sum(l_i * sqrt(eps_R,i))).
double analytic_fsr_hz(const ResonatorTopology& t);

// Copy of the topology with the per-resonance fit parameters substituted:
// total resonator length (short fixed sections - join, cpw - keep their
// length, the cable sections scale), coupling capacitance, and the cable
// internal quality factor.
ResonatorTopology with_fit_parameters(const ResonatorTopology& t,
                                      double resonator_length_m, double c_in_f,
                                      double internal_q);

// Uniform-line stand-in with the same launch, coupling, termination and
// total electrical length; used as the single-resonance fit template for
// composite assemblies.
BareCableTopology bare_equivalent(const ResonatorTopology& t);

// Standing-wave current classification at the join/interface.
enum class CurrentClass { node, antinode, intermediate };

std::string to_string(CurrentClass c);

struct InterfaceCurrent {
  double ratio = 0.0;  // |I(interface)| / max over the resonator
  CurrentClass cls = CurrentClass::intermediate;
};

// Ratio of the interface current to the maximum current along the resonator,
// classified with thresholds 0.25 (node) and 0.75 (antinode). Empty for the
// bare cable.
std::optional<InterfaceCurrent> classify_interface_current(
    const ResonatorTopology& t, double f_hz, const PortSpec& port = {},
    int profile_points = 1024);

}  // namespace coaxres

#endif  // COAXRES_TOPOLOGY_HPP
