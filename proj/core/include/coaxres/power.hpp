// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_POWER_HPP
#define COAXRES_POWER_HPP

#include <span>
#include <vector>

#include "coaxres/resonance.hpp"

namespace coaxres {

// Fractional absorbed power on resonance: A = 1 - (2*Q_t/Q_i - 1)^2.
// Requires 0 < Q_t <= Q_i; the result lies in [0, 1].
double absorbed_fraction(double q_t, double q_i);

// On-resonance cavity photon number N = Q_t * P_in * A / (2*pi*h*f^2).
double photon_number(double q_t, double p_in_w, double absorbed, double f_hz);

// Power reaching the circulator: P_in = P_gen * 10^(-attenuation_dB/10).
double input_power_w(double p_generator_w, double chain_attenuation_db);

// Conversion of an effective loss tangent 1/Q_i to a bulk material value:
// tan(d) = (1/Q_i) * (eps_bulk / eps_eff).
double bulk_loss_tangent(double q_i_mean, double eps_eff, double eps_bulk);

struct PowerPoint {
  double p_generator_w = 0.0;
  double chain_attenuation_db = 0.0;
  double p_in_w = 0.0;
  double a_fraction = 0.0;
  double n_photon = 0.0;
  double q_i = 0.0;
  double q_t = 0.0;
  double f0_hz = 0.0;
};

// One row per (fit, generator power) pair, sorted by photon number.
// The sequences must be the same length.
std::vector<PowerPoint> power_sweep_table(
    std::span<const ResonanceFitResult> fits,
    std::span<const double> generator_powers_w, double chain_attenuation_db);

}  // namespace coaxres

#endif  // COAXRES_POWER_HPP
