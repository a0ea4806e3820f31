// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <vector>

#include "coaxres/errors.hpp"

namespace coaxres {

namespace {

void validate_common(const TransmissionLineSpec& launch, double c_in_f,
                     Complex z_out) {
  validate(launch);
  if (!std::isfinite(c_in_f) || c_in_f <= 0.0) {
    throw ValidationError("topology coupling capacitance must be > 0");
  }
  if (!std::isfinite(z_out.real()) || !std::isfinite(z_out.imag())) {
    throw ValidationError("topology z_out must be finite");
  }
}

// The resonator region as an ordered list of line segments and lumped
// elements. Lumped elements sit between segments and have zero extent.
struct ResonatorPart {
  bool is_line = false;
  TransmissionLineSpec line{};
  AbcdMatrix lumped{};
};

std::vector<ResonatorPart> resonator_parts(const ResonatorTopology& t) {
  std::vector<ResonatorPart> parts;
  if (const auto* bare = std::get_if<BareCableTopology>(&t)) {
    parts.push_back({true, bare->resonator, {}});
  } else if (const auto* sp = std::get_if<SplicedCableTopology>(&t)) {
    const AbcdMatrix contact = series_impedance_matrix(Complex{sp->r_cont_ohm});
    parts.push_back({true, sp->half_a, {}});
    parts.push_back({false, {}, contact});
    parts.push_back({true, sp->join, {}});
    parts.push_back({false, {}, contact});
    parts.push_back({true, sp->half_b, {}});
  } else {
    const auto& ch = std::get<ChipCableTopology>(t);
    parts.push_back({true, ch.cpw, {}});
    parts.push_back(
        {false, {}, tee_attach_matrix(ch.r_cont_ohm, ch.r_shunt_ohm)});
    parts.push_back({true, ch.cable, {}});
  }
  return parts;
}

struct PortState {
  Complex voltage;
  Complex current;
};

// Port voltage/current for a unit incident voltage wave.
PortState port_state(const ResonatorTopology& t, double f_hz,
                     const PortSpec& port) {
  const Complex gamma = s11(compile(t, f_hz), port);
  return {1.0 + gamma, (1.0 - gamma) / port.reference_impedance_ohm};
}

LineState state_at(const ResonatorTopology& t, double f_hz, double position_m,
                   const PortState& at_port) {
  const auto* bare = std::get_if<BareCableTopology>(&t);
  const auto* sp = std::get_if<SplicedCableTopology>(&t);
  const auto* ch = std::get_if<ChipCableTopology>(&t);
  const TransmissionLineSpec& launch =
      bare ? bare->launch : (sp ? sp->launch : ch->launch);
  const double c_in = bare ? bare->c_in_f : (sp ? sp->c_in_f : ch->c_in_f);

  AbcdMatrix pre = tline_matrix(launch, f_hz) * series_capacitor_matrix(c_in, f_hz);
  double consumed = 0.0;
  for (const auto& part : resonator_parts(t)) {
    if (!part.is_line) {
      if (position_m >= consumed) pre = pre * part.lumped;
      continue;
    }
    const double remaining = position_m - consumed;
    if (remaining <= 0.0) break;
    TransmissionLineSpec seg = part.line;
    seg.length_m = std::min(part.line.length_m, remaining);
    pre = pre * tline_matrix(seg, f_hz);
    consumed += part.line.length_m;
    if (remaining < part.line.length_m) break;
  }

  const AbcdMatrix inv = pre.unimodular_inverse();
  return {inv.a * at_port.voltage + inv.b * at_port.current,
          inv.c * at_port.voltage + inv.d * at_port.current};
}

}  // namespace

void validate(const BareCableTopology& t) {
  validate_common(t.launch, t.c_in_f, t.z_out_ohm);
  validate(t.resonator);
}

void validate(const SplicedCableTopology& t) {
  validate_common(t.launch, t.c_in_f, t.z_out_ohm);
  validate(t.half_a);
  validate(t.join);
  validate(t.half_b);
  if (!std::isfinite(t.r_cont_ohm) || t.r_cont_ohm < 0.0) {
    throw ValidationError("splice contact resistance must be >= 0");
  }
}

void validate(const ChipCableTopology& t) {
  validate_common(t.launch, t.c_in_f, t.z_out_ohm);
  validate(t.cpw);
  validate(t.cable);
  if (!std::isfinite(t.r_cont_ohm) || t.r_cont_ohm < 0.0) {
    throw ValidationError("chip contact resistance must be >= 0");
  }
  if (std::isnan(t.r_shunt_ohm) || t.r_shunt_ohm <= 0.0) {
    throw ValidationError("chip shunt resistance must be > 0");
  }
}

void validate(const ResonatorTopology& t) {
  std::visit([](const auto& v) { validate(v); }, t);
}

std::string topology_kind_name(const ResonatorTopology& t) {
  if (std::holds_alternative<BareCableTopology>(t)) return "bare";
  if (std::holds_alternative<SplicedCableTopology>(t)) return "splice";
  return "chip";
}

std::string topology_fingerprint(const ResonatorTopology& t) {
  std::ostringstream os;
  os.precision(17);
  auto line = [&os](const TransmissionLineSpec& s) {
    os << s.impedance_ohm << ',' << s.length_m << ','
       << s.cap_per_length_f_per_m << ',' << s.internal_q << ';';
  };
  os << topology_kind_name(t) << ';';
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        line(v.launch);
        os << v.c_in_f << ';';
        if constexpr (std::is_same_v<T, BareCableTopology>) {
          line(v.resonator);
        } else if constexpr (std::is_same_v<T, SplicedCableTopology>) {
          line(v.half_a);
          os << v.r_cont_ohm << ';';
          line(v.join);
          line(v.half_b);
        } else {
          line(v.cpw);
          os << v.r_cont_ohm << ',' << v.r_shunt_ohm << ';';
          line(v.cable);
        }
        os << v.z_out_ohm.real() << ',' << v.z_out_ohm.imag();
      },
      t);

  // FNV-1a over the canonical parameter string.
  const std::string text = os.str();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AbcdMatrix compile(const ResonatorTopology& t, double f_hz) {
  if (!std::isfinite(f_hz) || f_hz <= 0.0) {
    throw ValidationError("compile requires f > 0");
  }
  const auto* bare = std::get_if<BareCableTopology>(&t);
  const auto* sp = std::get_if<SplicedCableTopology>(&t);
  const auto* ch = std::get_if<ChipCableTopology>(&t);
  const TransmissionLineSpec& launch =
      bare ? bare->launch : (sp ? sp->launch : ch->launch);
  const double c_in = bare ? bare->c_in_f : (sp ? sp->c_in_f : ch->c_in_f);
  const Complex z_out =
      bare ? bare->z_out_ohm : (sp ? sp->z_out_ohm : ch->z_out_ohm);

  AbcdMatrix m = tline_matrix(launch, f_hz) * series_capacitor_matrix(c_in, f_hz);
  for (const auto& part : resonator_parts(t)) {
    m = m * (part.is_line ? tline_matrix(part.line, f_hz) : part.lumped);
  }
  return m * series_impedance_matrix(z_out);
}

SweepResult sweep(const ResonatorTopology& t, std::span<const double> freqs_hz,
                  const PortSpec& port) {
  validate(t);
  validate(port);
  if (freqs_hz.size() < 2) {
    throw ValidationError("sweep requires at least 2 grid points");
  }
  SweepResult out;
  out.freqs_hz.assign(freqs_hz.begin(), freqs_hz.end());
  out.s11.reserve(freqs_hz.size());
  double prev = 0.0;
  for (double f : freqs_hz) {
    if (!(f > prev)) {
      throw ValidationError("sweep grid must be strictly increasing and > 0");
    }
    prev = f;
    try {
      out.s11.push_back(s11(compile(t, f), port));
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << e.what() << " (at f = " << f << " Hz)";
      throw SingularityError(os.str());
    }
  }
  out.meta["source"] = "model";
  out.meta["topology"] = topology_kind_name(t);
  out.meta["topology_hash"] = topology_fingerprint(t);
  return out;
}

double resonator_length_m(const ResonatorTopology& t) {
  double total = 0.0;
  for (const auto& part : resonator_parts(t)) {
    if (part.is_line) total += part.line.length_m;
  }
  return total;
}

std::optional<double> interface_position_m(const ResonatorTopology& t) {
  if (const auto* sp = std::get_if<SplicedCableTopology>(&t)) {
    return sp->half_a.length_m + 0.5 * sp->join.length_m;
  }
  if (const auto* ch = std::get_if<ChipCableTopology>(&t)) {
    return ch->cpw.length_m;
  }
  return std::nullopt;
}

double analytic_fsr_hz(const ResonatorTopology& t) {
  double electrical = 0.0;
  for (const auto& part : resonator_parts(t)) {
    if (part.is_line) {
      electrical += part.line.length_m * std::sqrt(part.line.epsilon_r());
    }
  }
  if (electrical <= 0.0) {
    throw ValidationError("resonator has zero electrical length");
  }
  return constants::speed_of_light_m_per_s / (2.0 * electrical);
}

LineState internal_state(const ResonatorTopology& t, double f_hz,
                         double position_m, const PortSpec& port) {
  validate(t);
  validate(port);
  const double total = resonator_length_m(t);
  if (!(position_m >= 0.0) || position_m > total) {
    std::ostringstream os;
    os << "position " << position_m << " m outside resonator [0, " << total
       << "] m";
    throw ValidationError(os.str());
  }
  return state_at(t, f_hz, position_m, port_state(t, f_hz, port));
}

ResonatorTopology with_fit_parameters(const ResonatorTopology& t,
                                      double resonator_length,
                                      double c_in_f, double internal_q) {
  if (!(resonator_length > 0.0)) {
    throw ValidationError("fit resonator length must be > 0");
  }
  ResonatorTopology out = t;
  if (auto* bare = std::get_if<BareCableTopology>(&out)) {
    bare->c_in_f = c_in_f;
    bare->resonator.length_m = resonator_length;
    bare->resonator.internal_q = internal_q;
  } else if (auto* sp = std::get_if<SplicedCableTopology>(&out)) {
    sp->c_in_f = c_in_f;
    const double cable_total = resonator_length - sp->join.length_m;
    const double old_total = sp->half_a.length_m + sp->half_b.length_m;
    if (cable_total <= 0.0 || old_total <= 0.0) {
      throw ValidationError("fit length shorter than the splice join region");
    }
    const double scale = cable_total / old_total;
    sp->half_a.length_m *= scale;
    sp->half_b.length_m *= scale;
    sp->half_a.internal_q = internal_q;
    sp->half_b.internal_q = internal_q;
  } else {
    auto& ch = std::get<ChipCableTopology>(out);
    ch.c_in_f = c_in_f;
    const double cable = resonator_length - ch.cpw.length_m;
    if (cable <= 0.0) {
      throw ValidationError("fit length shorter than the cpw section");
    }
    ch.cable.length_m = cable;
    ch.cable.internal_q = internal_q;
  }
  return out;
}

BareCableTopology bare_equivalent(const ResonatorTopology& t) {
  if (const auto* bare = std::get_if<BareCableTopology>(&t)) return *bare;

  BareCableTopology out;
  double electrical = 0.0;
  for (const auto& part : resonator_parts(t)) {
    if (part.is_line) {
      electrical += part.line.length_m * std::sqrt(part.line.epsilon_r());
    }
  }
  if (const auto* sp = std::get_if<SplicedCableTopology>(&t)) {
    out.launch = sp->launch;
    out.c_in_f = sp->c_in_f;
    out.z_out_ohm = sp->z_out_ohm;
    out.resonator = sp->half_a;
  } else {
    const auto& ch = std::get<ChipCableTopology>(t);
    out.launch = ch.launch;
    out.c_in_f = ch.c_in_f;
    out.z_out_ohm = ch.z_out_ohm;
    out.resonator = ch.cable;
  }
  out.resonator.length_m = electrical / std::sqrt(out.resonator.epsilon_r());
  return out;
}

std::string to_string(CurrentClass c) {
  switch (c) {
    case CurrentClass::node:
      return "node";
    case CurrentClass::antinode:
      return "antinode";
    default:
      return "intermediate";
  }
}

std::optional<InterfaceCurrent> classify_interface_current(
    const ResonatorTopology& t, double f_hz, const PortSpec& port,
    int profile_points) {
  const auto x_if = interface_position_m(t);
  if (!x_if) return std::nullopt;
  validate(t);
  validate(port);
  if (profile_points < 16) {
    throw ValidationError("profile needs at least 16 points");
  }

  const PortState at_port = port_state(t, f_hz, port);
  const double total = resonator_length_m(t);
  double max_current = 0.0;
  for (int i = 0; i <= profile_points; ++i) {
    const double x = total * static_cast<double>(i) /
                     static_cast<double>(profile_points);
    max_current =
        std::max(max_current, std::abs(state_at(t, f_hz, x, at_port).current_a));
  }
  const double at_interface =
      std::abs(state_at(t, f_hz, *x_if, at_port).current_a);
  max_current = std::max(max_current, at_interface);
  if (max_current <= 0.0) return InterfaceCurrent{0.0, CurrentClass::node};

  InterfaceCurrent out;
  out.ratio = at_interface / max_current;
  out.cls = out.ratio < 0.25
                ? CurrentClass::node
                : (out.ratio > 0.75 ? CurrentClass::antinode
                                    : CurrentClass::intermediate);
  return out;
}

}  // namespace coaxres
