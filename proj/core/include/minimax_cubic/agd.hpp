#pragma once

#include <cstdint>
#include <functional>

#include "minimax_cubic/types.hpp"

namespace minimax_cubic {

struct AgdParams {
  double eta = 1.0;    // step size
  double theta = 0.0;  // momentum
  std::int64_t K = 0;  // iterations
};

/// Step size 1/ell_h and momentum (sqrt(kappa_h) - 1) / (sqrt(kappa_h) + 1).
AgdParams agd_params_for(double ell_h, double mu_h, std::int64_t K);

using GradientFn = std::function<Vector(const Vector&)>;

/// Nesterov's accelerated gradient descent on a smooth strongly convex h.
/// The gradient is taken at the extrapolated point, so exactly K gradient
/// evaluations are made. Returns y_K.
Vector agd_minimize(const GradientFn& h_grad, const Vector& y0, const AgdParams& params);

struct AgdUntilResult {
  Vector y;
  double grad_norm = 0.0;  // |grad h(y)| at the returned point
  std::int64_t iterations = 0;
};

/// Runs AGD until |grad h(y_k)| <= tol, checking at the non-extrapolated
/// iterate. Throws IterationCapError after max_iters steps.
AgdUntilResult agd_minimize_until(const GradientFn& h_grad, const Vector& y0,
                                  const AgdParams& params, double tol,
                                  std::int64_t max_iters);

/// sqrt(kappa_h + 1) * (1 - 1/sqrt(kappa_h))^(K/2) * dist0.
double agd_rate_bound(double kappa_h, std::int64_t K, double dist0);

/// Smallest K with agd_rate_bound(kappa_h, K, dist0) <= target.
std::int64_t agd_iters_for(double kappa_h, double dist0, double target);

}  // namespace minimax_cubic
