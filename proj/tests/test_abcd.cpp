// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "coaxres/abcd.hpp"
#include "coaxres/errors.hpp"
#include "test_util.hpp"

using namespace coaxres;
using testutil::cnear;
using testutil::rel_err;

namespace {

// A lossless line whose electrical length is `radians` at frequency f.
TransmissionLineSpec lossless_line(double phase_radians, double f_hz,
                                   double z0 = 50.0) {
  TransmissionLineSpec line;
  line.impedance_ohm = z0;
  const double sqrt_eps = 1.5;
  line.cap_per_length_f_per_m =
      sqrt_eps / (constants::speed_of_light_m_per_s * z0);
  line.length_m = phase_radians * constants::speed_of_light_m_per_s /
                  (2.0 * std::numbers::pi * f_hz * sqrt_eps);
  return line;
}

}  // namespace

TEST_CASE("quarter-wave lossless line matrix") {
  const double f = 5e9;
  const AbcdMatrix m = tline_matrix(lossless_line(std::numbers::pi / 2, f), f);
  CHECK(cnear(m.a, 0.0, 1e-9));
  CHECK(cnear(m.b, Complex(0.0, 50.0), 1e-9));
  CHECK(cnear(m.c, Complex(0.0, 0.02), 1e-12));
  CHECK(cnear(m.d, 0.0, 1e-9));
}

TEST_CASE("half-wave lossless line matrix") {
  const double f = 5e9;
  const AbcdMatrix m = tline_matrix(lossless_line(std::numbers::pi, f), f);
  CHECK(cnear(m.a, -1.0, 1e-9));
  CHECK(cnear(m.b, 0.0, 1e-7));
  CHECK(cnear(m.c, 0.0, 1e-9));
  CHECK(cnear(m.d, -1.0, 1e-9));
}

TEST_CASE("lossy line attenuation matches the coefficient formula") {
  // 50 ohm, 1 m, 83 pF/m, Q_i = 1.55e6 at 5 GHz. Direct evaluation of the
  // attenuation formula gives alpha = 8.4114e-5 Np/m; the matched |S21|^2 of
  // the segment must equal exp(-alpha*l).
  TransmissionLineSpec line{50.0, 1.0, 83.0e-12, 1.55e6};
  const double f = 5e9;
  const double alpha_expected = 8.411360975740413e-05;

  const double alpha = attenuation_coeff_np_per_m(f, line.epsilon_r(), line.internal_q);
  CHECK(rel_err(alpha, alpha_expected) < 1e-12);

  const AbcdMatrix m = tline_matrix(line, f);
  CHECK(std::abs(m.determinant() - 1.0) < 1e-9);

  const Complex den = m.a + m.b / 50.0 + m.c * 50.0 + m.d;
  const double s21_sq = std::norm(2.0 / den);
  CHECK(rel_err(s21_sq, std::exp(-alpha * line.length_m)) < 1e-9);
}

TEST_CASE("series impedance elements") {
  CHECK(cnear(series_impedance_matrix(Complex{0.0}).b, 0.0));
  CHECK(cnear(series_impedance_matrix(Complex{0.0}).a, 1.0));

  const AbcdMatrix splice = series_impedance_matrix(Complex{6e-4});
  CHECK(cnear(splice.b, 6e-4));
  CHECK(cnear(splice.c, 0.0));

  const AbcdMatrix chip = series_impedance_matrix(Complex{8.5e-4});
  CHECK(cnear(chip.b, 8.5e-4));

  CHECK_THROWS_AS(
      series_impedance_matrix(Complex{std::numeric_limits<double>::infinity()}),
      ValidationError);
}

TEST_CASE("series coupling capacitor") {
  const AbcdMatrix m = series_capacitor_matrix(3.602e-15, 4.902e9);
  CHECK(rel_err(-m.b.imag(), 9013.700347572858) < 1e-12);
  CHECK(m.b.real() == 0.0);

  // Large capacitance limit: the element approaches a through connection.
  CHECK(std::abs(series_capacitor_matrix(1.0, 1e9).b) < 1e-9);

  // 1/f scaling.
  const double b1 = std::abs(series_capacitor_matrix(3.602e-15, 2e9).b);
  const double b2 = std::abs(series_capacitor_matrix(3.602e-15, 4e9).b);
  CHECK(rel_err(b1, 2.0 * b2) < 1e-12);

  CHECK_THROWS_AS(series_capacitor_matrix(3.602e-15, 0.0), SingularityError);
  CHECK_THROWS_AS(series_capacitor_matrix(0.0, 1e9), ValidationError);
}

TEST_CASE("tee attach matrix") {
  SUBCASE("degenerate limits give the identity") {
    const AbcdMatrix m =
        tee_attach_matrix(0.0, std::numeric_limits<double>::infinity());
    CHECK(cnear(m.a, 1.0));
    CHECK(cnear(m.b, 0.0));
    CHECK(cnear(m.c, 0.0));
    CHECK(cnear(m.d, 1.0));
  }
  SUBCASE("reference values") {
    const AbcdMatrix m = tee_attach_matrix(8.5e-4, 1.3e7);
    // a - 1 = r/(2R) = 3.269e-11 sits near the double ulp of 1.0.
    CHECK(rel_err(m.a.real() - 1.0, 3.269230769230769e-11) < 1e-4);
    CHECK(rel_err(m.b.real(), 8.5e-4) < 1e-9);
    CHECK(rel_err(m.c.real(), 7.692307692307692e-08) < 1e-12);
    CHECK(m.a == m.d);
  }
  SUBCASE("unimodular for contact-scale parameters") {
    testutil::Rng rng(0x7ee5eed5u);
    for (int i = 0; i < 1000; ++i) {
      const double r = rng.log_uniform(1e-8, 1e-1);
      const double rs = rng.log_uniform(1e4, 1e12);
      const AbcdMatrix m = tee_attach_matrix(r, rs);
      CHECK(std::abs(m.determinant() - 1.0) < 1e-12);
    }
  }
  SUBCASE("unimodular for extreme parameters, scaled tolerance") {
    testutil::Rng rng(0x7ee5eed6u);
    for (int i = 0; i < 1000; ++i) {
      const double r = rng.log_uniform(1e-8, 1e2);
      const double rs = rng.log_uniform(1e-2, 1e12);
      CHECK(testutil::det_defect(tee_attach_matrix(r, rs)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(tee_attach_matrix(1e-3, 0.0), ValidationError);
  CHECK_THROWS_AS(tee_attach_matrix(-1e-3, 1e7), ValidationError);
}

TEST_CASE("cascade") {
  const double f = 4e9;
  const AbcdMatrix quarter =
      tline_matrix(lossless_line(std::numbers::pi / 2, f), f);
  const AbcdMatrix series = series_impedance_matrix(Complex{3.0, -2.0});

  SUBCASE("identity is neutral") {
    const AbcdMatrix elems[] = {AbcdMatrix::identity(), series};
    const AbcdMatrix m = cascade(elems);
    CHECK(cnear(m.b, series.b));
    CHECK(cnear(m.a, series.a));
  }
  SUBCASE("associative") {
    const AbcdMatrix lhs = (quarter * series) * quarter;
    const AbcdMatrix rhs = quarter * (series * quarter);
    CHECK(cnear(lhs.a, rhs.a, 1e-12));
    CHECK(cnear(lhs.b, rhs.b, 1e-12));
    CHECK(cnear(lhs.c, rhs.c, 1e-12));
    CHECK(cnear(lhs.d, rhs.d, 1e-12));
  }
  SUBCASE("two quarter waves make a half wave") {
    const AbcdMatrix elems[] = {quarter, quarter};
    const AbcdMatrix m = cascade(elems);
    CHECK(cnear(m.a, -1.0, 1e-9));
    CHECK(cnear(m.b, 0.0, 1e-7));
    CHECK(cnear(m.d, -1.0, 1e-9));
  }
  SUBCASE("empty cascade is a usage error") {
    CHECK_THROWS_AS(cascade({}), ValidationError);
  }
}

TEST_CASE("s11 analytic cases") {
  const PortSpec port{};
  CHECK(cnear(s11(AbcdMatrix::identity(), port), 0.0));

  // Series Z0: z / (z + 2*Z0) = 1/3.
  CHECK(cnear(s11(series_impedance_matrix(Complex{50.0}), port),
              Complex{1.0 / 3.0}, 1e-12));

  // Shunt admittance 1/Z0.
  const AbcdMatrix shunt{Complex{1.0}, Complex{0.0}, Complex{1.0 / 50.0},
                         Complex{1.0}};
  CHECK(cnear(s11(shunt, port), Complex{-1.0 / 3.0}, 1e-12));
}

TEST_CASE("epsilon_r conversion") {
  CHECK(rel_err(epsilon_r(83.0e-12, 50.0), 1.5478811065794842) < 1e-12);

  const double c_l = 1.0 / (constants::speed_of_light_m_per_s * 50.0);
  CHECK(epsilon_r(c_l, 50.0) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(rel_err(epsilon_r(2 * 83.0e-12, 50.0), 4.0 * epsilon_r(83.0e-12, 50.0)) <
        1e-12);
}

TEST_CASE("attenuation coefficient and dB/km helper") {
  CHECK(attenuation_coeff_np_per_m(0.0, 1.55, 1.55e6) == 0.0);

  const double alpha = attenuation_coeff_np_per_m(5e9, 1.55, 1.55e6);
  CHECK(rel_err(alpha, 8.417116160078364e-05) < 1e-12);
  CHECK(rel_err(np_per_m_to_db_per_km(alpha), 0.36555071018607205) < 1e-12);

  // Linear in f, inverse in Q_i.
  CHECK(rel_err(attenuation_coeff_np_per_m(10e9, 1.55, 1.55e6), 2.0 * alpha) <
        1e-12);
  CHECK(rel_err(attenuation_coeff_np_per_m(5e9, 1.55, 3.1e6), 0.5 * alpha) <
        1e-12);
}

TEST_CASE("external and total quality factors") {
  const double qe = external_q(41, 4.902e9, 3.602e-15, 50.0);
  CHECK(rel_err(qe, 2.093e6) < 1e-3);
  CHECK(rel_err(qe, 2093003.514358876) < 1e-12);

  CHECK(rel_err(external_q(82, 4.902e9, 3.602e-15, 50.0), 2.0 * qe) < 1e-12);
  CHECK(external_q(1, 5e9, 1e-19, 50.0) > 1e13);  // decoupled limit

  const double qt = total_q(1.556e6, qe);
  CHECK(rel_err(qt, 8.926e5) < 1e-3);
  CHECK(qt <= std::min(1.556e6, qe));

  CHECK(total_q(1.0e6, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0e6));
  CHECK(total_q(2.0e6, 2.0e6) == doctest::Approx(1.0e6));
}

TEST_CASE("reciprocity of random element cascades") {
  testutil::Rng rng(0xabcd0001u);
  for (int trial = 0; trial < 2000; ++trial) {
    AbcdMatrix m = AbcdMatrix::identity();
    const int elements = rng.integer(1, 6);
    const double f = rng.log_uniform(1e8, 1e10);
    for (int e = 0; e < elements; ++e) {
      switch (rng.integer(0, 3)) {
        case 0:
          m = m * tline_matrix(testutil::random_line(rng), f);
          break;
        case 1:
          m = m * series_impedance_matrix(
                      Complex{rng.uniform(0.0, 100.0), rng.uniform(-50.0, 50.0)});
          break;
        case 2:
          m = m * series_capacitor_matrix(rng.log_uniform(1e-16, 1e-12), f);
          break;
        default:
          m = m * tee_attach_matrix(rng.log_uniform(1e-6, 1e-1),
                                    rng.log_uniform(1e4, 1e12));
          break;
      }
    }
    CHECK(testutil::det_defect(m) < 1e-9);
  }
}

TEST_CASE("tline overflow is rejected with a diagnostic") {
  TransmissionLineSpec line{50.0, 1.0, 83.0e-12, 1e-12};
  CHECK_THROWS_AS(tline_matrix(line, 5e9), NumericalError);
}

TEST_CASE("spec validation") {
  TransmissionLineSpec line{-50.0, 1.0, 83.0e-12, 1e6};
  CHECK_THROWS_AS(validate(line), ValidationError);
  CHECK_THROWS_AS(validate(PortSpec{-1.0}), ValidationError);
  CHECK_THROWS_AS(external_q(0, 5e9, 1e-15, 50.0), ValidationError);
  CHECK_THROWS_AS(total_q(-1.0, 1e6), ValidationError);
}
