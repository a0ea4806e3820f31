// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_SURVEY_HPP
#define COAXRES_SURVEY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coaxres/resonance.hpp"
#include "coaxres/sweep_result.hpp"
#include "coaxres/topology.hpp"

namespace coaxres {

// One longitudinal mode of a survey: fitted internal quality factor plus the
// standing-wave current classification at the join/interface (empty for the
// bare cable, which has no interface).
struct ModeRecord {
  int n = 0;
  double f_hz = 0.0;
  double q_i = 0.0;
  std::optional<InterfaceCurrent> interface_current;
  ResonanceFitResult fit;
  bool fit_ok = false;
  std::string error;
};

struct SurveyOptions {
  double min_dip_db = 3.0;
  double min_separation_hz = 1e6;
  // Fit windows: +-window_linewidths around the dip, resampled from the
  // model on an equal grid of at least min_window_points.
  double window_linewidths = 10.0;
  int min_window_points = 401;
  FitOptions fit{};
  // Model-driven mode location: a coarse scan around each predicted mode,
  // then a refining scan before the fit window is placed.
  double coarse_scan_span_hz = 8e6;
  int coarse_scan_points = 4001;
  int refine_scan_points = 1501;
};

// Sweeps the model between f_lo and f_hi, locates every longitudinal mode,
// fits each resonance (composite assemblies are fit with their uniform-line
// equivalent, which is how per-mode Q_i is defined), and classifies the
// interface current. Failed modes are flagged and the survey continues.
std::vector<ModeRecord> mode_survey(const ResonatorTopology& topology,
                                    double f_lo_hz, double f_hi_hz,
                                    const PortSpec& port = {},
                                    const SurveyOptions& options = {});

// Same per-mode pipeline applied to an existing trace (measured or
// synthesized): find_resonances on the given grid, fit windows sliced from
// the data, classification from the template topology.
std::vector<ModeRecord> survey_trace(const SweepResult& sweep,
                                     const ResonatorTopology& tmpl,
                                     const PortSpec& port = {},
                                     const SurveyOptions& options = {});

// Residuals f_n - (n * fsr + offset) with the offset chosen by least
// squares. Uses fitted modes only; requires at least 2.
std::vector<double> fsr_residuals(std::span<const ModeRecord> modes,
                                  double fsr_hz);

// Arithmetic mean of fitted Q_i (fitted modes only).
double mean_internal_q(std::span<const ModeRecord> modes);

struct FamilyMeans {
  double node_q = 0.0;
  double antinode_q = 0.0;
  int node_count = 0;
  int antinode_count = 0;
};

// Mean Q_i of the current-node and current-antinode mode families.
FamilyMeans family_means(std::span<const ModeRecord> modes);

struct CalibrationTarget {
  double measured_mean_q = 0.0;
  double model_mean_q = 0.0;
};

// Result of a global splice or chip calibration. For the splice, r_shunt is
// absent, model_modes holds the model mode table and node/antinode carry the
// family means. For the chip attach, model_modes / model_modes_secondary
// hold the half-wave and quarter-wave model tables and halfwave/quarterwave
// carry the dataset means.
struct GlobalFitResult {
  double r_cont_ohm = 0.0;
  std::optional<double> r_shunt_ohm;
  double fixed_cable_q = 0.0;
  double objective_value = 0.0;
  bool degenerate = false;
  std::vector<std::string> warnings;
  std::vector<ModeRecord> model_modes;
  std::vector<ModeRecord> model_modes_secondary;
  CalibrationTarget node, antinode;
  CalibrationTarget halfwave, quarterwave;
};

struct CalibrationOptions {
  double f_lo_hz = 3e9;
  double f_hi_hz = 5.5e9;
  double r_cont_min_ohm = 1e-6;
  double r_cont_max_ohm = 1e-1;
  double r_shunt_min_ohm = 1e4;
  double r_shunt_max_ohm = 1e12;
  double rel_tol = 1e-3;
  SurveyOptions survey{};
};

// Scalar search over the contact resistance that matches the model family
// means to the measured ones, both families weighted equally. The cable
// internal quality factor of the template is pinned to fixed_cable_q.
GlobalFitResult calibrate_splice_means(double node_mean_q,
                                       double antinode_mean_q,
                                       double fixed_cable_q,
                                       const SplicedCableTopology& tmpl,
                                       const PortSpec& port = {},
                                       const CalibrationOptions& options = {});

// As above, with the family means computed from measured mode records. The
// records must contain both current-node and current-antinode modes.
GlobalFitResult calibrate_splice(std::span<const ModeRecord> measured,
                                 double fixed_cable_q,
                                 const SplicedCableTopology& tmpl,
                                 const PortSpec& port = {},
                                 const CalibrationOptions& options = {});

// Exactly-determined two-parameter match: r_shunt against the half-wave
// (voltage-maximum) dataset mean, r_cont against the quarter-wave
// (current-maximum) dataset mean, solved by nested scalar searches.
GlobalFitResult calibrate_chip_means(double halfwave_mean_q,
                                     double quarterwave_mean_q,
                                     double fixed_cable_q,
                                     const ChipCableTopology& tmpl_halfwave,
                                     const ChipCableTopology& tmpl_quarterwave,
                                     const PortSpec& port = {},
                                     const CalibrationOptions& options = {});

GlobalFitResult calibrate_chip(std::span<const ModeRecord> measured_halfwave,
                               std::span<const ModeRecord> measured_quarterwave,
                               double fixed_cable_q,
                               const ChipCableTopology& tmpl_halfwave,
                               const ChipCableTopology& tmpl_quarterwave,
                               const PortSpec& port = {},
                               const CalibrationOptions& options = {});

}  // namespace coaxres

#endif  // COAXRES_SURVEY_HPP
