// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_CONFIG_HPP
#define COAXRES_CONFIG_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coaxres/noise.hpp"
#include "coaxres/survey.hpp"
#include "coaxres/topology.hpp"

namespace coaxres {

struct SweepConfig {
  double f_min_hz = 3e9;
  double f_max_hz = 5.5e9;
  int points = 250001;
};

struct FitSettings {
  int max_iterations = 200;
  double relative_cost_tol = 1e-10;
  double window_linewidths = 10.0;
  int min_window_points = 401;
  double min_dip_db = 3.0;
  double min_separation_hz = 1e6;
  std::optional<double> target_f0_hz;  // which dip the `fit` command takes
};

struct PowerConfig {
  double chain_attenuation_db = 80.4;  // fixed attenuators + cable loss
  std::vector<double> generator_powers_w = {1e-7,  1e-8,  1e-9,  1e-10, 1e-11,
                                            1e-12, 1e-13, 1e-14, 1e-15};
};

struct CalibrationSettings {
  double fixed_cable_q = 1.55e6;
  double f_lo_hz = 3e9;
  double f_hi_hz = 5.5e9;
  double r_cont_min_ohm = 1e-6;
  double r_cont_max_ohm = 1e-1;
  double r_shunt_min_ohm = 1e4;
  double r_shunt_max_ohm = 1e12;
  double rel_tol = 1e-3;
};

// The parsed configuration document (schema_version 1). All quantities are
// SI base units; unknown keys are rejected.
struct Config {
  int schema_version = 1;
  PortSpec port{};
  std::optional<ResonatorTopology> topology;
  SweepConfig sweep{};
  FitSettings fit{};
  NoiseModel noise{NoiseKind::additive_complex_gaussian, 0.005, 1};
  PowerConfig power{};
  CalibrationSettings calibration{};
  double fsr_reference_hz = 1.2075e8;

  SurveyOptions survey_options() const;
  FitOptions fit_options() const;
  CalibrationOptions calibration_options() const;
};

void validate(const Config& config);

// Parse / serialize. Overrides are dotted-path assignments applied to the
// JSON document before validation, e.g. {"topology.r_cont_ohm", "6e-4"}.
using ConfigOverride = std::pair<std::string, std::string>;

Config parse_config_text(const std::string& json_text,
                         const std::vector<ConfigOverride>& overrides = {});
Config load_config(const std::string& path,
                   const std::vector<ConfigOverride>& overrides = {});
Config apply_overrides(const Config& config,
                       const std::vector<ConfigOverride>& overrides);
std::string config_to_text(const Config& config);

// Built-in configurations with the reference assemblies. Kinds: "bare",
// "splice", "chip-halfwave", "chip-quarterwave", "none" (no topology).
Config default_config(const std::string& topology_kind);

// Reference assemblies.
TransmissionLineSpec default_cable_line();
TransmissionLineSpec default_launch_line();
BareCableTopology default_bare_topology();
SplicedCableTopology default_splice_topology();
ChipCableTopology default_chip_topology(bool halfwave);

}  // namespace coaxres

#endif  // COAXRES_CONFIG_HPP
