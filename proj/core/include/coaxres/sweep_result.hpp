// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_SWEEP_RESULT_HPP
#define COAXRES_SWEEP_RESULT_HPP

#include <map>
#include <string>
#include <vector>

#include "coaxres/abcd.hpp"

namespace coaxres {

// A single-port reflection trace: S11 samples on a strictly increasing
// frequency grid, plus free-form provenance (source file, generating
// topology hash, noise seed, ...).
struct SweepResult {
  std::vector<double> freqs_hz;
  std::vector<Complex> s11;
  std::map<std::string, std::string> meta;

  std::size_t size() const { return freqs_hz.size(); }
};

// Throws ValidationError unless lengths match, size >= 2 and frequencies are
// strictly increasing and positive.
void validate(const SweepResult& sweep);

// Inclusive endpoints, points >= 2.
std::vector<double> linspace(double lo, double hi, int points);

}  // namespace coaxres

#endif  // COAXRES_SWEEP_RESULT_HPP
