// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_RESONANCE_HPP
#define COAXRES_RESONANCE_HPP

#include <vector>

#include "coaxres/sweep_result.hpp"
#include "coaxres/topology.hpp"

namespace coaxres {

// Coarse resonance search: local minima of |S11|^2 at least min_dip_db below
// the local baseline, refined by 3-point parabolic interpolation. Minima
// closer than min_separation_hz are merged into the deeper one. Returns
// ascending frequency estimates; an empty result is not an error.
std::vector<double> find_resonances(const SweepResult& sweep, double min_dip_db,
                                    double min_separation_hz);

// Which parameters a resonance fit may vary. Everything else is pinned to
// the initial guess.
struct FreeParameters {
  bool length = true;
  bool c_in = true;
  bool q_i = true;
  bool phase = true;
  bool amplitude = true;
  bool delay = true;
};

struct ResonanceFitResult {
  double f0_hz = 0.0;
  int mode_n = 0;
  double q_i = 0.0;
  double q_e = 0.0;
  double q_t = 0.0;
  double c_in_f = 0.0;
  double length_m = 0.0;
  double phase_offset_rad = 0.0;
  double amplitude = 1.0;
  double electrical_delay_s = 0.0;
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct FitOptions {
  int max_iterations = 200;
  double relative_cost_tol = 1e-10;
  double jacobian_rel_step = 1e-6;
  // Guard: the window must contain a dip at least this deep.
  double min_dip_db = 0.5;
};

// Shape measurements of the deepest dip in a window, used for seeding.
struct DipEstimate {
  double f0_hz = 0.0;
  double fwhm_hz = 0.0;
  double depth = 1.0;     // |S11| at the dip / baseline
  double baseline = 1.0;  // off-resonance |S11|
};
DipEstimate estimate_dip(const SweepResult& window);

// Builds an initial guess from the dip shape: f0 from the parabolic-refined
// minimum, Q_t from the half-depth width, the Q_i/Q_e split from the dip
// depth (both coupling branches are tried, the cheaper one wins), mode index
// and length from the template mode spacing, phase/delay from the window
// wings.
ResonanceFitResult seed_resonance_fit(const SweepResult& window,
                                      const ResonatorTopology& tmpl,
                                      const PortSpec& port = {});

// Damped least squares on stacked real/imaginary residuals of
//   amplitude * exp(j(phase + 2*pi*f*delay)) * S11_model(f; length, c_in, q_i)
// against the window samples. Non-convergence is reported through the
// `converged` flag with best-so-far values, not an exception. A window with
// no dip throws NoResonanceError.
ResonanceFitResult fit_resonance(const SweepResult& window,
                                 const ResonatorTopology& tmpl,
                                 const FreeParameters& free_params,
                                 const ResonanceFitResult& init,
                                 const PortSpec& port = {},
                                 const FitOptions& options = {});

// Model reflection with the fitted parameters and nuisance terms applied.
Complex modeled_s11(const ResonatorTopology& tmpl,
                    const ResonanceFitResult& params, double f_hz,
                    const PortSpec& port = {});

}  // namespace coaxres

#endif  // COAXRES_RESONANCE_HPP
