// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/power.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coaxres/errors.hpp"

namespace coaxres {

double absorbed_fraction(double q_t, double q_i) {
  if (!(q_t > 0.0) || !(q_i > 0.0)) {
    throw ValidationError("absorbed_fraction requires Q_t > 0 and Q_i > 0");
  }
  if (q_t > q_i * (1.0 + 1e-12)) {
    throw ValidationError("absorbed_fraction requires Q_t <= Q_i");
  }
  const double x = 2.0 * q_t / q_i - 1.0;
  return std::clamp(1.0 - x * x, 0.0, 1.0);
}

double photon_number(double q_t, double p_in_w, double absorbed, double f_hz) {
  if (q_t < 0.0 || p_in_w < 0.0 || absorbed < 0.0) {
    throw ValidationError("photon_number requires non-negative inputs");
  }
  if (!(f_hz > 0.0)) throw ValidationError("photon_number requires f > 0");
  return q_t * p_in_w * absorbed /
         (2.0 * std::numbers::pi * constants::planck_j_s * f_hz * f_hz);
}

double input_power_w(double p_generator_w, double chain_attenuation_db) {
  if (p_generator_w < 0.0) {
    throw ValidationError("generator power must be >= 0");
  }
  return p_generator_w * std::pow(10.0, -chain_attenuation_db / 10.0);
}

double bulk_loss_tangent(double q_i_mean, double eps_eff, double eps_bulk) {
  if (!(q_i_mean > 0.0) || !(eps_eff > 0.0) || !(eps_bulk > 0.0)) {
    throw ValidationError("bulk_loss_tangent requires positive inputs");
  }
  return (1.0 / q_i_mean) * (eps_bulk / eps_eff);
}

std::vector<PowerPoint> power_sweep_table(
    std::span<const ResonanceFitResult> fits,
    std::span<const double> generator_powers_w, double chain_attenuation_db) {
  if (fits.size() != generator_powers_w.size()) {
    throw ValidationError(
        "power_sweep_table requires one fit per generator power");
  }
  std::vector<PowerPoint> out;
  out.reserve(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i) {
    PowerPoint row;
    row.p_generator_w = generator_powers_w[i];
    row.chain_attenuation_db = chain_attenuation_db;
    row.p_in_w = input_power_w(generator_powers_w[i], chain_attenuation_db);
    row.q_i = fits[i].q_i;
    row.q_t = fits[i].q_t;
    row.f0_hz = fits[i].f0_hz;
    row.a_fraction = absorbed_fraction(fits[i].q_t, fits[i].q_i);
    row.n_photon =
        photon_number(fits[i].q_t, row.p_in_w, row.a_fraction, fits[i].f0_hz);
    out.push_back(row);
  }
  std::sort(out.begin(), out.end(), [](const PowerPoint& a, const PowerPoint& b) {
    return a.n_photon < b.n_photon;
  });
  return out;
}

}  // namespace coaxres
