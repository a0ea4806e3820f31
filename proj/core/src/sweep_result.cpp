// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/sweep_result.hpp"

#include <cmath>
#include <sstream>

#include "coaxres/errors.hpp"

namespace coaxres {

void validate(const SweepResult& sweep) {
  if (sweep.freqs_hz.size() != sweep.s11.size()) {
    throw ValidationError("sweep frequency and S11 arrays differ in length");
  }
  if (sweep.freqs_hz.size() < 2) {
    throw ValidationError("sweep must contain at least 2 points");
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < sweep.freqs_hz.size(); ++i) {
    const double f = sweep.freqs_hz[i];
    if (!std::isfinite(f) || f <= prev) {
      std::ostringstream os;
      os << "sweep frequencies must be positive and strictly increasing "
            "(violated at index "
         << i << ")";
      throw ValidationError(os.str());
    }
    prev = f;
  }
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw ValidationError("linspace requires at least 2 points");
  if (!(lo < hi)) throw ValidationError("linspace requires lo < hi");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
  }
  out.back() = hi;
  return out;
}

}  // namespace coaxres
