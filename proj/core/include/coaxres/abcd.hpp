// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_ABCD_HPP
#define COAXRES_ABCD_HPP

#include <complex>
#include <limits>
#include <span>

namespace coaxres {

using Complex = std::complex<double>;

namespace constants {
// CODATA defined values.
inline constexpr double speed_of_light_m_per_s = 2.99792458e8;
inline constexpr double planck_j_s = 6.62607015e-34;
}  // namespace constants

//
// 2x2 transfer matrix of a two-port network, relating input voltage/current
// to output voltage/current. A and D are dimensionless, B is an impedance
// (ohm), C an admittance (1/ohm). Cascaded networks multiply left to right,
// input side first. Every element produced by this module is reciprocal:
// det = a*d - b*c == 1.
//
struct AbcdMatrix {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};
  Complex d{1.0, 0.0};

  static AbcdMatrix identity() { return {}; }

  Complex determinant() const { return a * d - b * c; }

  // Inverse assuming unimodularity (det == 1). Exact for reciprocal networks.
  AbcdMatrix unimodular_inverse() const { return {d, -b, -c, a}; }

  friend AbcdMatrix operator*(const AbcdMatrix& l, const AbcdMatrix& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }

  bool is_finite() const;
};

// Single-port reference system.
struct PortSpec {
  double reference_impedance_ohm = 50.0;
};

//
// One uniform transmission line section. Loss is parameterized by the
// internal quality factor Q_i instead of an attenuation coefficient;
// internal_q = +infinity means a lossless section. The relative
// permittivity is derived from the capacitance per unit length:
// eps_R = (c * C_l * Z)^2.
//
struct TransmissionLineSpec {
  double impedance_ohm = 50.0;
  double length_m = 0.0;
  double cap_per_length_f_per_m = 0.0;
  double internal_q = std::numeric_limits<double>::infinity();

  double epsilon_r() const;
  bool lossless() const { return std::isinf(internal_q); }
};

void validate(const PortSpec& port);
void validate(const TransmissionLineSpec& spec);

// Relative permittivity implied by capacitance per length and impedance:
// eps_R = (c * C_l * Z0)^2.
double epsilon_r(double cap_per_length_f_per_m, double impedance_ohm);

// Power attenuation coefficient alpha = 2*pi*f*sqrt(eps_R) / (c * Q_i),
// in nepers per meter. The amplitude coefficient is alpha/2.
double attenuation_coeff_np_per_m(double f_hz, double eps_r, double internal_q);

// Converts a power attenuation coefficient to dB/km. alpha is a power
// coefficient, so one neper is 10*log10(e) ~ 4.343 dB, not 8.686.
double np_per_m_to_db_per_km(double alpha_np_per_m);

// External quality factor of mode n of a resonator coupled through a series
// capacitor c_in: Q_e = n / (8*pi*(f*C_in*Z0)^2).
double external_q(int mode_order, double f_hz, double c_in_f, double z0_ohm);

// Harmonic combination Q_t = 1 / (1/Q_i + 1/Q_e). Accepts +infinity.
double total_q(double q_i, double q_e);

// Transfer matrix of a uniform line section of the given spec at frequency f:
//   [[cos(beta*l), j*Z*sin(beta*l)], [j*sin(beta*l)/Z, cos(beta*l)]]
// with a complex propagation constant combining the phase constant
// 2*pi*f*sqrt(eps_R)/c and the power attenuation alpha of Eq.-style
// alpha/2 amplitude decay. Evaluated through exponential (cosh/sinh) forms.
// Throws NumericalError if alpha*l is so large the entries overflow.
AbcdMatrix tline_matrix(const TransmissionLineSpec& spec, double f_hz);

// Series impedance element [[1, z], [0, 1]].
AbcdMatrix series_impedance_matrix(Complex z_ohm);

// Series coupling capacitor: series impedance -j / (2*pi*f*c_in).
AbcdMatrix series_capacitor_matrix(double c_in_f, double f_hz);

// Symmetric tee at a conductor join: a contact resistance r_cont split around
// a shunt resistance r_shunt,
//   [[1 + r/(2R), r + r^2/(4R)], [1/R, 1 + r/(2R)]].
// r_shunt may be +infinity (pure series contact).
AbcdMatrix tee_attach_matrix(double r_cont_ohm, double r_shunt_ohm);

// Left-to-right product of a non-empty element sequence, input side first.
AbcdMatrix cascade(std::span<const AbcdMatrix> elements);

// Reflection coefficient of the two-port terminated in the port reference
// impedance: (A + B/Z0 - C*Z0 - D) / (A + B/Z0 + C*Z0 + D).
Complex s11(const AbcdMatrix& m, const PortSpec& port = {});

}  // namespace coaxres

#endif  // COAXRES_ABCD_HPP
