// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_LEAST_SQUARES_HPP
#define COAXRES_LEAST_SQUARES_HPP

#include <functional>
#include <vector>

namespace coaxres {

// Residual callback: fills `out` (fixed length) from the parameter vector.
// May throw ValidationError/NumericalError for an infeasible trial point;
// the solver treats that as a rejected step.
using ResidualFn =
    std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_cost_tol = 1e-10;
  double jacobian_rel_step = 1e-6;
  double lambda_init = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 0.25;
};

struct LeastSquaresResult {
  std::vector<double> params;
  double cost = 0.0;  // sum of squared residuals
  int iterations = 0;
  bool converged = false;
};

// Damped (Levenberg-style) least squares on a dense numeric Jacobian.
// Parameters are expected to be reasonably scaled (O(1)); callers normalize.
LeastSquaresResult levenberg_fit(const ResidualFn& fn,
                                 std::vector<double> initial,
                                 std::size_t n_residuals,
                                 const LeastSquaresOptions& options = {});

}  // namespace coaxres

#endif  // COAXRES_LEAST_SQUARES_HPP
