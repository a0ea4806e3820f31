// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_NOISE_HPP
#define COAXRES_NOISE_HPP

#include <cstdint>
#include <span>

#include "coaxres/sweep_result.hpp"
#include "coaxres/topology.hpp"

namespace coaxres {

enum class NoiseKind { none, additive_complex_gaussian };

// Additive white complex Gaussian measurement noise; sigma is the per-point
// standard deviation of each quadrature in S-parameter units. Generation is
// bit-deterministic for a given seed.
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

void validate(const NoiseModel& noise);

// sweep() plus an independent complex Gaussian perturbation per point.
// Provenance (topology hash, noise kind, sigma, seed) lands in the metadata.
SweepResult synthesize(const ResonatorTopology& topology,
                       std::span<const double> freqs_hz,
                       const NoiseModel& noise, const PortSpec& port = {});

}  // namespace coaxres

#endif  // COAXRES_NOISE_HPP
