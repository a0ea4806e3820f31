// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "coaxres/errors.hpp"

namespace coaxres {

namespace {

// Box-Muller on raw mt19937_64 output; std::normal_distribution is not
// pinned across standard library implementations, this is.
class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  // One standard-normal pair.
  std::pair<double, double> pair() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

private:
  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform_open() {  // (0, 1]
    return 1.0 - uniform();
  }
  std::mt19937_64 engine_;
};

}  // namespace

void validate(const NoiseModel& noise) {
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
    throw ValidationError("noise sigma must be finite and >= 0");
  }
}

SweepResult synthesize(const ResonatorTopology& topology,
                       std::span<const double> freqs_hz,
                       const NoiseModel& noise, const PortSpec& port) {
  validate(noise);
  SweepResult out = sweep(topology, freqs_hz, port);

  if (noise.kind == NoiseKind::additive_complex_gaussian && noise.sigma > 0.0) {
    GaussianSource source(noise.seed);
    for (auto& v : out.s11) {
      const auto [re, im] = source.pair();
      v += Complex(noise.sigma * re, noise.sigma * im);
    }
  }

  out.meta["source"] = "synthesized";
  out.meta["noise_kind"] = noise.kind == NoiseKind::none
                               ? "none"
                               : "additive-complex-gaussian";
  {
    std::ostringstream os;
    os.precision(17);
    os << noise.sigma;
    out.meta["noise_sigma"] = os.str();
  }
  out.meta["noise_seed"] = std::to_string(noise.seed);
  return out;
}

}  // namespace coaxres
