// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "coaxres/errors.hpp"
#include "coaxres/least_squares.hpp"

namespace coaxres {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Vertex of the parabola through three points; falls back to x1 when the
// points are collinear or the curvature is non-positive.
double parabolic_vertex(double x0, double y0, double x1, double y1, double x2,
                        double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (!(curv > 0.0)) return x1;
  const double vertex = 0.5 * (x0 + x1 - d01 / curv);
  return std::clamp(vertex, x0, x2);
}

double power_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace

std::vector<double> find_resonances(const SweepResult& sweep, double min_dip_db,
                                    double min_separation_hz) {
  validate(sweep);
  if (!(min_dip_db > 0.0)) {
    throw ValidationError("find_resonances requires min_dip_db > 0");
  }
  if (min_separation_hz < 0.0) {
    throw ValidationError("min_separation must be >= 0");
  }

  const auto& f = sweep.freqs_hz;
  const std::size_t n = f.size();
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::norm(sweep.s11[i]);

  const double grid_step = (f.back() - f.front()) / static_cast<double>(n - 1);
  const double baseline_span =
      std::max(min_separation_hz, 10.0 * grid_step);

  struct Dip {
    std::size_t index;
    double f0;
    double power;
  };
  std::vector<Dip> dips;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(p[i] < p[i - 1]) || !(p[i] <= p[i + 1])) continue;

    // Local baseline: the largest power within the surrounding span.
    double baseline = p[i];
    for (std::size_t j = i; j-- > 0 && f[i] - f[j] <= baseline_span;) {
      baseline = std::max(baseline, p[j]);
    }
    for (std::size_t j = i + 1; j < n && f[j] - f[i] <= baseline_span; ++j) {
      baseline = std::max(baseline, p[j]);
    }
    if (p[i] <= 0.0 || power_db(baseline / p[i]) >= min_dip_db) {
      const double f0 = parabolic_vertex(f[i - 1], p[i - 1], f[i], p[i],
                                         f[i + 1], p[i + 1]);
      dips.push_back({i, f0, p[i]});
    }
  }

  // Merge close minima, keeping the deeper one.
  std::vector<Dip> merged;
  for (const auto& dip : dips) {
    if (!merged.empty() && dip.f0 - merged.back().f0 < min_separation_hz) {
      if (dip.power < merged.back().power) merged.back() = dip;
    } else {
      merged.push_back(dip);
    }
  }

  std::vector<double> out;
  out.reserve(merged.size());
  for (const auto& dip : merged) out.push_back(dip.f0);
  return out;
}

DipEstimate estimate_dip(const SweepResult& window) {
  validate(window);
  const auto& f = window.freqs_hz;
  const std::size_t n = f.size();

  std::size_t imin = 0;
  double pmin = std::norm(window.s11[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double p = std::norm(window.s11[i]);
    if (p < pmin) {
      pmin = p;
      imin = i;
    }
  }

  // Baseline from the outer 10% of points on each side.
  const std::size_t wing = std::max<std::size_t>(1, n / 10);
  double acc = 0.0;
  for (std::size_t i = 0; i < wing; ++i) {
    acc += std::abs(window.s11[i]) + std::abs(window.s11[n - 1 - i]);
  }
  const double baseline = acc / static_cast<double>(2 * wing);

  DipEstimate est;
  est.baseline = baseline > 0.0 ? baseline : 1.0;
  est.depth = std::sqrt(pmin) / est.baseline;

  est.f0_hz = f[imin];
  if (imin > 0 && imin + 1 < n) {
    est.f0_hz = parabolic_vertex(f[imin - 1], std::norm(window.s11[imin - 1]),
                                 f[imin], pmin, f[imin + 1],
                                 std::norm(window.s11[imin + 1]));
  }

  // Full width at half depth of the |S11|^2 dip.
  const double half_level = 0.5 * (pmin + est.baseline * est.baseline);
  double f_left = f.front();
  for (std::size_t i = imin; i-- > 0;) {
    const double pa = std::norm(window.s11[i]);
    if (pa >= half_level) {
      const double pb = std::norm(window.s11[i + 1]);
      const double t = (half_level - pa) / (pb - pa);
      f_left = f[i] + t * (f[i + 1] - f[i]);
      break;
    }
  }
  double f_right = f.back();
  for (std::size_t i = imin + 1; i < n; ++i) {
    const double pb = std::norm(window.s11[i]);
    if (pb >= half_level) {
      const double pa = std::norm(window.s11[i - 1]);
      const double t = (half_level - pa) / (pb - pa);
      f_right = f[i - 1] + t * (f[i] - f[i - 1]);
      break;
    }
  }
  est.fwhm_hz = std::max(f_right - f_left, 2.0 * (f[1] - f[0]));
  return est;
}

namespace {

struct NuisanceSeed {
  double phase = 0.0;
  double delay = 0.0;
};

// Linear phase of data relative to the model across the window wings.
NuisanceSeed seed_nuisance_phase(const SweepResult& window,
                                 const ResonatorTopology& topo,
                                 double amplitude, const PortSpec& port) {
  const std::size_t n = window.size();
  const std::size_t wing = std::max<std::size_t>(2, n / 8);
  std::vector<double> fs, psis;
  double prev = 0.0;
  bool first = true;
  auto add = [&](std::size_t i) {
    const Complex model = s11(compile(topo, window.freqs_hz[i]), port);
    if (std::abs(model) < 1e-12) return;
    double psi = std::arg(window.s11[i] / (amplitude * model));
    if (!first) {
      while (psi - prev > std::numbers::pi) psi -= kTwoPi;
      while (prev - psi > std::numbers::pi) psi += kTwoPi;
    }
    first = false;
    prev = psi;
    fs.push_back(window.freqs_hz[i]);
    psis.push_back(psi);
  };
  for (std::size_t i = 0; i < wing; ++i) add(i);
  for (std::size_t i = n - wing; i < n; ++i) add(i);

  NuisanceSeed out;
  if (fs.size() < 2) return out;
  double mf = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    mf += fs[i];
    mp += psis[i];
  }
  mf /= static_cast<double>(fs.size());
  mp /= static_cast<double>(fs.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    num += (fs[i] - mf) * (psis[i] - mp);
    den += (fs[i] - mf) * (fs[i] - mf);
  }
  const double slope = den > 0.0 ? num / den : 0.0;
  out.delay = slope / kTwoPi;
  out.phase = mp - slope * mf;
  return out;
}

double window_cost(const SweepResult& window, const ResonatorTopology& tmpl,
                   const ResonanceFitResult& p, const PortSpec& port) {
  const ResonatorTopology topo =
      with_fit_parameters(tmpl, p.length_m, p.c_in_f, p.q_i);
  double cost = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double f = window.freqs_hz[i];
    const Complex model = p.amplitude *
                          std::exp(Complex(0.0, p.phase_offset_rad +
                                                    kTwoPi * f *
                                                        p.electrical_delay_s)) *
                          s11(compile(topo, f), port);
    cost += std::norm(model - window.s11[i]);
  }
  return cost;
}

}  // namespace

ResonanceFitResult seed_resonance_fit(const SweepResult& window,
                                      const ResonatorTopology& tmpl,
                                      const PortSpec& port) {
  validate(tmpl);
  const DipEstimate dip = estimate_dip(window);
  const double fsr = analytic_fsr_hz(tmpl);
  const int n = std::max(1, static_cast<int>(std::lround(dip.f0_hz / fsr)));
  const double q_t = dip.f0_hz / dip.fwhm_hz;

  const double z0 = port.reference_impedance_ohm;
  const double depth = std::clamp(dip.depth, 1e-6, 1.0 - 1e-9);

  ResonanceFitResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int branch = 0; branch < 2; ++branch) {
    // |S11(f0)| = |Qe - Qi| / (Qe + Qi): two coupling branches.
    double ratio = (1.0 - depth) / (1.0 + depth);  // Qi / Qe, undercoupled
    if (branch == 1) ratio = 1.0 / ratio;

    ResonanceFitResult seed;
    seed.f0_hz = dip.f0_hz;
    seed.mode_n = n;
    seed.q_i = q_t * (1.0 + ratio);
    seed.q_e = q_t * (1.0 + 1.0 / ratio);
    seed.q_t = q_t;
    seed.c_in_f = std::sqrt(static_cast<double>(n) /
                            (8.0 * std::numbers::pi * seed.q_e)) /
                  (dip.f0_hz * z0);
    seed.length_m =
        resonator_length_m(tmpl) * (static_cast<double>(n) * fsr / dip.f0_hz);
    seed.amplitude = dip.baseline;

    const ResonatorTopology topo =
        with_fit_parameters(tmpl, seed.length_m, seed.c_in_f, seed.q_i);
    const NuisanceSeed nuisance =
        seed_nuisance_phase(window, topo, seed.amplitude, port);
    seed.phase_offset_rad = nuisance.phase;
    seed.electrical_delay_s = nuisance.delay;

    const double cost = window_cost(window, tmpl, seed, port);
    if (cost < best_cost) {
      best = seed;
      best_cost = cost;
    }
  }
  return best;
}

ResonanceFitResult fit_resonance(const SweepResult& window,
                                 const ResonatorTopology& tmpl,
                                 const FreeParameters& free_params,
                                 const ResonanceFitResult& init,
                                 const PortSpec& port,
                                 const FitOptions& options) {
  validate(window);
  validate(tmpl);
  validate(port);

  const DipEstimate dip = estimate_dip(window);
  if (power_db(1.0 / std::max(dip.depth * dip.depth, 1e-300)) <
      options.min_dip_db) {
    std::ostringstream os;
    os << "no resonance in window [" << window.freqs_hz.front() << ", "
       << window.freqs_hz.back() << "] Hz (deepest dip "
       << power_db(1.0 / std::max(dip.depth * dip.depth, 1e-300)) << " dB)";
    throw NoResonanceError(os.str());
  }

  if (!(init.length_m > 0.0) || !(init.c_in_f > 0.0) || !(init.q_i > 0.0) ||
      !(init.amplitude > 0.0)) {
    throw ValidationError("fit seed requires positive length, c_in, q_i, amplitude");
  }

  // Normalized parameter vector: [l, c_in, q_i, phase, amplitude, delay].
  const double span = window.freqs_hz.back() - window.freqs_hz.front();
  const double scales[6] = {init.length_m, init.c_in_f,   init.q_i,
                            1.0,           init.amplitude, 1.0 / (kTwoPi * span)};
  const double start[6] = {init.length_m,
                           init.c_in_f,
                           init.q_i,
                           init.phase_offset_rad,
                           init.amplitude,
                           init.electrical_delay_s};
  const bool active[6] = {free_params.length, free_params.c_in,
                          free_params.q_i,    free_params.phase,
                          free_params.amplitude, free_params.delay};

  std::vector<int> map;
  std::vector<double> x0;
  for (int j = 0; j < 6; ++j) {
    if (active[j]) {
      map.push_back(j);
      x0.push_back(start[j] / scales[j]);
    }
  }
  if (map.empty()) throw ValidationError("fit requires at least one free parameter");

  const std::size_t n_res = 2 * window.size();
  auto unpack = [&](const std::vector<double>& x) {
    double p[6];
    for (int j = 0; j < 6; ++j) p[j] = start[j];
    for (std::size_t k = 0; k < map.size(); ++k) {
      p[static_cast<std::size_t>(map[k])] = x[k] * scales[map[k]];
    }
    return std::array<double, 6>{p[0], p[1], p[2], p[3], p[4], p[5]};
  };

  ResidualFn residuals = [&](const std::vector<double>& x,
                             std::vector<double>& out) {
    const auto p = unpack(x);
    if (!(p[0] > 0.0) || !(p[1] > 0.0) || !(p[2] > 0.0) || !(p[4] > 0.0)) {
      throw ValidationError("infeasible trial point");
    }
    const ResonatorTopology topo = with_fit_parameters(tmpl, p[0], p[1], p[2]);
    for (std::size_t i = 0; i < window.size(); ++i) {
      const double f = window.freqs_hz[i];
      const Complex rot =
          p[4] * std::exp(Complex(0.0, p[3] + kTwoPi * f * p[5]));
      const Complex diff = rot * s11(compile(topo, f), port) - window.s11[i];
      out[2 * i] = diff.real();
      out[2 * i + 1] = diff.imag();
    }
  };

  LeastSquaresOptions ls;
  ls.max_iterations = options.max_iterations;
  ls.relative_cost_tol = options.relative_cost_tol;
  ls.jacobian_rel_step = options.jacobian_rel_step;
  const LeastSquaresResult lsq = levenberg_fit(residuals, x0, n_res, ls);

  const auto p = unpack(lsq.params);
  ResonanceFitResult out;
  out.length_m = p[0];
  out.c_in_f = p[1];
  out.q_i = p[2];
  out.phase_offset_rad = p[3];
  out.amplitude = p[4];
  out.electrical_delay_s = p[5];
  out.converged = lsq.converged;
  out.iterations = lsq.iterations;
  out.residual_rms = std::sqrt(lsq.cost / static_cast<double>(window.size()));

  // Resonance frequency of the fitted model: coarse scan plus golden-section
  // refinement of |S11| inside the window.
  const ResonatorTopology fitted = with_fit_parameters(tmpl, p[0], p[1], p[2]);
  const double f_lo = window.freqs_hz.front();
  const double f_hi = window.freqs_hz.back();
  const int coarse = 801;
  double fmin = dip.f0_hz;
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < coarse; ++i) {
    const double f =
        f_lo + (f_hi - f_lo) * static_cast<double>(i) / (coarse - 1);
    const double v = std::abs(s11(compile(fitted, f), port));
    if (v < vmin) {
      vmin = v;
      fmin = f;
    }
  }
  double a = std::max(f_lo, fmin - 2.0 * (f_hi - f_lo) / (coarse - 1));
  double b = std::min(f_hi, fmin + 2.0 * (f_hi - f_lo) / (coarse - 1));
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - gr * (b - a);
  double c2 = a + gr * (b - a);
  double v1 = std::abs(s11(compile(fitted, c1), port));
  double v2 = std::abs(s11(compile(fitted, c2), port));
  for (int it = 0; it < 60 && (b - a) > 1e-6; ++it) {
    if (v1 < v2) {
      b = c2;
      c2 = c1;
      v2 = v1;
      c1 = b - gr * (b - a);
      v1 = std::abs(s11(compile(fitted, c1), port));
    } else {
      a = c1;
      c1 = c2;
      v1 = v2;
      c2 = a + gr * (b - a);
      v2 = std::abs(s11(compile(fitted, c2), port));
    }
  }
  out.f0_hz = 0.5 * (a + b);

  out.mode_n = std::max(
      1, static_cast<int>(std::lround(out.f0_hz / analytic_fsr_hz(fitted))));
  out.q_e = external_q(out.mode_n, out.f0_hz, out.c_in_f,
                       port.reference_impedance_ohm);
  out.q_t = total_q(out.q_i, out.q_e);
  return out;
}

Complex modeled_s11(const ResonatorTopology& tmpl,
                    const ResonanceFitResult& params, double f_hz,
                    const PortSpec& port) {
  const ResonatorTopology topo =
      with_fit_parameters(tmpl, params.length_m, params.c_in_f, params.q_i);
  const Complex rot =
      params.amplitude *
      std::exp(Complex(0.0, params.phase_offset_rad +
                                kTwoPi * f_hz * params.electrical_delay_s));
  return rot * s11(compile(topo, f_hz), port);
}

}  // namespace coaxres
