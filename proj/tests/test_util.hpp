// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_TESTS_TEST_UTIL_HPP
#define COAXRES_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <random>

#include "coaxres/topology.hpp"

namespace testutil {

using coaxres::Complex;

inline bool cnear(Complex a, Complex b, double tol = 1e-12) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

inline double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

// |det - 1| relative to the magnitude of the determinant's constituent
// products; the honest double-precision statement of reciprocity for
// matrices whose entries are far from unity.
inline double det_defect(const coaxres::AbcdMatrix& m) {
  const double scale =
      std::max(1.0, std::abs(m.a * m.d) + std::abs(m.b * m.c));
  return std::abs(m.determinant() - 1.0) / scale;
}

// Deterministic helper around a seeded engine; every stochastic test names
// its seed explicitly.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine);
  }
  bool flip() { return integer(0, 1) == 1; }
};

inline coaxres::TransmissionLineSpec random_line(Rng& rng,
                                                 bool allow_lossless = true) {
  coaxres::TransmissionLineSpec line;
  line.impedance_ohm = rng.uniform(10.0, 200.0);
  line.length_m = rng.uniform(0.01, 2.0);
  // eps_R in roughly [1, 10]
  const double sqrt_eps = rng.uniform(1.0, 3.2);
  line.cap_per_length_f_per_m =
      sqrt_eps / (coaxres::constants::speed_of_light_m_per_s * line.impedance_ohm);
  if (allow_lossless && rng.flip()) {
    line.internal_q = std::numeric_limits<double>::infinity();
  } else {
    line.internal_q = rng.log_uniform(1e2, 1e7);
  }
  return line;
}

// A random passive assembly of any of the three variants.
inline coaxres::ResonatorTopology random_topology(Rng& rng) {
  const int kind = rng.integer(0, 2);
  const auto launch = random_line(rng);
  const double c_in = rng.log_uniform(1e-16, 1e-13);
  const Complex z_out{rng.log_uniform(1.0, 1e9), 0.0};
  if (kind == 0) {
    coaxres::BareCableTopology t;
    t.launch = launch;
    t.c_in_f = c_in;
    t.resonator = random_line(rng);
    t.z_out_ohm = z_out;
    return t;
  }
  if (kind == 1) {
    coaxres::SplicedCableTopology t;
    t.launch = launch;
    t.c_in_f = c_in;
    t.half_a = random_line(rng);
    t.half_b = random_line(rng);
    t.join = random_line(rng);
    t.join.length_m = rng.uniform(0.0, 0.05);
    t.r_cont_ohm = rng.log_uniform(1e-6, 1e-1);
    t.z_out_ohm = z_out;
    return t;
  }
  coaxres::ChipCableTopology t;
  t.launch = launch;
  t.c_in_f = c_in;
  t.cpw = random_line(rng);
  t.cpw.length_m = rng.uniform(0.001, 0.05);
  t.cable = random_line(rng);
  t.r_cont_ohm = rng.log_uniform(1e-6, 1e-1);
  t.r_shunt_ohm = rng.log_uniform(1e4, 1e12);
  t.z_out_ohm = z_out;
  return t;
}

}  // namespace testutil

#endif  // COAXRES_TESTS_TEST_UTIL_HPP
