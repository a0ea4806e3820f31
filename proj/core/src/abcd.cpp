// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/abcd.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "coaxres/errors.hpp"

namespace coaxres {

namespace {

bool finite(Complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

bool AbcdMatrix::is_finite() const {
  return finite(a) && finite(b) && finite(c) && finite(d);
}

void validate(const PortSpec& port) {
  if (!std::isfinite(port.reference_impedance_ohm) ||
      port.reference_impedance_ohm <= 0.0) {
    throw ValidationError("port reference impedance must be finite and > 0");
  }
}

void validate(const TransmissionLineSpec& spec) {
  if (!std::isfinite(spec.impedance_ohm) || spec.impedance_ohm <= 0.0) {
    throw ValidationError("transmission line impedance must be finite and > 0");
  }
  if (!std::isfinite(spec.length_m) || spec.length_m < 0.0) {
    throw ValidationError("transmission line length must be finite and >= 0");
  }
  if (!std::isfinite(spec.cap_per_length_f_per_m) ||
      spec.cap_per_length_f_per_m <= 0.0) {
    throw ValidationError("capacitance per length must be finite and > 0");
  }
  // internal_q == +inf is the lossless case.
  if (std::isnan(spec.internal_q) || spec.internal_q <= 0.0) {
    throw ValidationError("internal quality factor must be > 0");
  }
}

double TransmissionLineSpec::epsilon_r() const {
  return coaxres::epsilon_r(cap_per_length_f_per_m, impedance_ohm);
}

double epsilon_r(double cap_per_length_f_per_m, double impedance_ohm) {
  if (cap_per_length_f_per_m <= 0.0 || impedance_ohm <= 0.0) {
    throw ValidationError("epsilon_r requires C_l > 0 and Z0 > 0");
  }
  const double x =
      constants::speed_of_light_m_per_s * cap_per_length_f_per_m * impedance_ohm;
  return x * x;
}

double attenuation_coeff_np_per_m(double f_hz, double eps_r, double internal_q) {
  if (f_hz < 0.0) throw ValidationError("attenuation requires f >= 0");
  if (eps_r <= 0.0) throw ValidationError("attenuation requires eps_r > 0");
  if (std::isnan(internal_q) || internal_q <= 0.0) {
    throw ValidationError("attenuation requires Q_i > 0");
  }
  return 2.0 * std::numbers::pi * f_hz * std::sqrt(eps_r) /
         (constants::speed_of_light_m_per_s * internal_q);
}

double np_per_m_to_db_per_km(double alpha_np_per_m) {
  return alpha_np_per_m * 10.0 * std::numbers::log10e * 1000.0;
}

double external_q(int mode_order, double f_hz, double c_in_f, double z0_ohm) {
  if (mode_order < 1) throw ValidationError("mode order must be >= 1");
  if (f_hz <= 0.0 || c_in_f <= 0.0 || z0_ohm <= 0.0) {
    throw ValidationError("external_q requires f, C_in, Z0 > 0");
  }
  const double x = f_hz * c_in_f * z0_ohm;
  return static_cast<double>(mode_order) / (8.0 * std::numbers::pi * x * x);
}

double total_q(double q_i, double q_e) {
  if (std::isnan(q_i) || q_i <= 0.0 || std::isnan(q_e) || q_e <= 0.0) {
    throw ValidationError("total_q requires Q_i > 0 and Q_e > 0");
  }
  return 1.0 / (1.0 / q_i + 1.0 / q_e);
}

AbcdMatrix tline_matrix(const TransmissionLineSpec& spec, double f_hz) {
  validate(spec);
  if (!std::isfinite(f_hz) || f_hz < 0.0) {
    throw ValidationError("tline_matrix requires finite f >= 0");
  }

  const double eps_r = spec.epsilon_r();
  const double alpha = attenuation_coeff_np_per_m(f_hz, eps_r, spec.internal_q);
  const double phase = 2.0 * std::numbers::pi * f_hz * std::sqrt(eps_r) /
                       constants::speed_of_light_m_per_s;

  // gamma = alpha/2 + j*beta; cosh/sinh give
  // cosh(gamma*l) = cos(beta*l)cosh(alpha*l/2) + j sin(beta*l)sinh(alpha*l/2),
  // the attenuating branch of the complex-trig line matrix.
  const Complex gl{0.5 * alpha * spec.length_m, phase * spec.length_m};
  const Complex ch = std::cosh(gl);
  const Complex sh = std::sinh(gl);

  AbcdMatrix m{ch, spec.impedance_ohm * sh, sh / spec.impedance_ohm, ch};
  if (!m.is_finite()) {
    std::ostringstream os;
    os << "tline_matrix overflow: alpha*l = " << alpha * spec.length_m
       << " Np at f = " << f_hz << " Hz";
    throw NumericalError(os.str());
  }
  return m;
}

AbcdMatrix series_impedance_matrix(Complex z_ohm) {
  if (!finite(z_ohm)) {
    throw ValidationError("series impedance must be finite");
  }
  return {Complex{1.0}, z_ohm, Complex{0.0}, Complex{1.0}};
}

AbcdMatrix series_capacitor_matrix(double c_in_f, double f_hz) {
  if (!std::isfinite(c_in_f) || c_in_f <= 0.0) {
    throw ValidationError("coupling capacitance must be finite and > 0");
  }
  if (!std::isfinite(f_hz) || f_hz <= 0.0) {
    throw SingularityError("series capacitor impedance is singular at f = 0");
  }
  const double x = 2.0 * std::numbers::pi * f_hz * c_in_f;
  return series_impedance_matrix(Complex{0.0, -1.0 / x});
}

AbcdMatrix tee_attach_matrix(double r_cont_ohm, double r_shunt_ohm) {
  if (!std::isfinite(r_cont_ohm) || r_cont_ohm < 0.0) {
    throw ValidationError("contact resistance must be finite and >= 0");
  }
  if (std::isnan(r_shunt_ohm) || r_shunt_ohm <= 0.0) {
    throw ValidationError("shunt resistance must be > 0");
  }
  const double diag = 1.0 + r_cont_ohm / (2.0 * r_shunt_ohm);
  const double series =
      r_cont_ohm + r_cont_ohm * r_cont_ohm / (4.0 * r_shunt_ohm);
  const double shunt = 1.0 / r_shunt_ohm;
  return {Complex{diag}, Complex{series}, Complex{shunt}, Complex{diag}};
}

AbcdMatrix cascade(std::span<const AbcdMatrix> elements) {
  if (elements.empty()) {
    throw ValidationError("cascade requires a non-empty element sequence");
  }
  AbcdMatrix m = elements.front();
  for (std::size_t i = 1; i < elements.size(); ++i) m = m * elements[i];
  return m;
}

Complex s11(const AbcdMatrix& m, const PortSpec& port) {
  validate(port);
  const double z0 = port.reference_impedance_ohm;
  const Complex num = m.a + m.b / z0 - m.c * z0 - m.d;
  const Complex den = m.a + m.b / z0 + m.c * z0 + m.d;
  if (!finite(den) || std::abs(den) < 1e-30) {
    throw SingularityError("s11 denominator A + B/Z0 + C*Z0 + D vanished");
  }
  return num / den;
}

}  // namespace coaxres
