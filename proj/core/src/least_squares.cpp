// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/least_squares.hpp"

#include <cmath>
#include <limits>

#include "coaxres/errors.hpp"

namespace coaxres {

namespace {

double cost_of(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

// Solves (A + lambda*diag(A)) x = b in place via Cholesky; A is n*n row
// major, symmetric positive semi-definite. Returns false if not factorable.
bool solve_damped(std::vector<double> a, std::vector<double> b, double lambda,
                  std::size_t n, std::vector<double>& x) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i * n + i];
    a[i * n + i] = d + lambda * d + 1e-300;
  }
  // Cholesky factorization.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  // Forward/back substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * x[k];
    x[ii] = s / a[ii * n + ii];
  }
  return true;
}

}  // namespace

LeastSquaresResult levenberg_fit(const ResidualFn& fn,
                                 std::vector<double> initial,
                                 std::size_t n_residuals,
                                 const LeastSquaresOptions& options) {
  const std::size_t n = initial.size();
  if (n == 0) throw ValidationError("levenberg_fit requires parameters");
  if (n_residuals < n) {
    throw ValidationError("levenberg_fit requires n_residuals >= n_params");
  }

  std::vector<double> r(n_residuals), r_trial(n_residuals);
  std::vector<double> jac(n_residuals * n);
  std::vector<double> jtj(n * n), jtr(n), step(n);

  LeastSquaresResult out;
  out.params = std::move(initial);
  fn(out.params, r);
  out.cost = cost_of(r);

  double lambda = options.lambda_init;
  std::vector<double> perturbed(n), col(n_residuals);

  for (out.iterations = 0; out.iterations < options.max_iterations;
       ++out.iterations) {
    // Forward-difference Jacobian, relative step on each parameter.
    for (std::size_t j = 0; j < n; ++j) {
      const double p = out.params[j];
      double h = options.jacobian_rel_step * std::abs(p);
      if (h == 0.0) h = options.jacobian_rel_step;
      perturbed = out.params;
      perturbed[j] = p + h;
      try {
        fn(perturbed, col);
      } catch (const Error&) {
        perturbed[j] = p - h;
        fn(perturbed, col);
        h = -h;
      }
      for (std::size_t i = 0; i < n_residuals; ++i) {
        jac[i * n + j] = (col[i] - r[i]) / h;
      }
    }

    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n_residuals; ++i) {
          s += jac[i * n + a] * jac[i * n + b];
        }
        jtj[a * n + b] = s;
        jtj[b * n + a] = s;
      }
      double s = 0.0;
      for (std::size_t i = 0; i < n_residuals; ++i) {
        s += jac[i * n + a] * r[i];
      }
      jtr[a] = -s;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      if (!solve_damped(jtj, jtr, lambda, n, step)) {
        lambda *= options.lambda_up;
        continue;
      }
      std::vector<double> trial(n);
      for (std::size_t j = 0; j < n; ++j) trial[j] = out.params[j] + step[j];

      double trial_cost = std::numeric_limits<double>::infinity();
      try {
        fn(trial, r_trial);
        trial_cost = cost_of(r_trial);
      } catch (const Error&) {
        // infeasible trial point; treat as a rejected step
      }

      if (std::isfinite(trial_cost) && trial_cost <= out.cost) {
        const double drop = out.cost - trial_cost;
        out.params = std::move(trial);
        r = r_trial;
        const double prev = out.cost;
        out.cost = trial_cost;
        lambda = std::max(1e-12, lambda * options.lambda_down);
        accepted = true;
        if (drop <= options.relative_cost_tol * std::max(prev, 1e-300)) {
          out.converged = true;
          ++out.iterations;
          return out;
        }
      } else {
        lambda *= options.lambda_up;
      }
    }

    if (!accepted) {
      // Damping exhausted without an acceptable step: local minimum.
      out.converged = true;
      ++out.iterations;
      return out;
    }
  }
  return out;  // converged stays false: iteration budget exhausted
}

}  // namespace coaxres
