#include "minimax_cubic/agd.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace minimax_cubic {

AgdParams agd_params_for(double ell_h, double mu_h, std::int64_t K) {
  if (!(ell_h > 0.0) || !(mu_h > 0.0) || mu_h > ell_h) {
    throw std::invalid_argument("agd: need 0 < mu_h <= ell_h");
  }
  const double sk = std::sqrt(ell_h / mu_h);
  AgdParams p;
  p.eta = 1.0 / ell_h;
  p.theta = ell_h == mu_h ? 0.0 : (sk - 1.0) / (sk + 1.0);
  p.K = K;
  return p;
}

namespace {

void validate(const AgdParams& p) {
  if (!(p.eta > 0.0)) throw std::invalid_argument("agd: eta must be positive");
  if (!(p.theta >= 0.0 && p.theta < 1.0)) throw std::invalid_argument("agd: theta must lie in [0, 1)");
  if (p.K < 0) throw std::invalid_argument("agd: K must be non-negative");
}

Vector checked_grad(const GradientFn& h_grad, const Vector& at, std::int64_t k) {
  Vector g = h_grad(at);
  if (g.size() != at.size()) throw std::invalid_argument("agd: gradient has the wrong length");
  if (!all_finite(g)) {
    std::ostringstream msg;
    msg << "agd: non-finite gradient at iteration " << k;
    throw NumericalError(msg.str());
  }
  return g;
}

}  // namespace

Vector agd_minimize(const GradientFn& h_grad, const Vector& y0, const AgdParams& params) {
  validate(params);
  Vector y = y0;
  Vector y_tilde = y0;
  for (std::int64_t k = 0; k < params.K; ++k) {
    const Vector g = checked_grad(h_grad, y_tilde, k);
    Vector y_next = y_tilde - params.eta * g;
    y_tilde = y_next + params.theta * (y_next - y);
    y = std::move(y_next);
  }
  return y;
}

AgdUntilResult agd_minimize_until(const GradientFn& h_grad, const Vector& y0,
                                  const AgdParams& params, double tol,
                                  std::int64_t max_iters) {
  validate(params);
  if (!(tol > 0.0)) throw std::invalid_argument("agd: tolerance must be positive");
  Vector y = y0;
  Vector y_tilde = y0;
  Vector g = checked_grad(h_grad, y, 0);
  std::int64_t k = 0;
  while (g.norm() > tol) {
    if (k >= max_iters) {
      std::ostringstream msg;
      msg << "agd: gradient norm " << g.norm() << " still above " << tol << " after " << k
          << " iterations";
      throw IterationCapError(msg.str());
    }
    const Vector gt = k == 0 ? g : checked_grad(h_grad, y_tilde, k);
    Vector y_next = y_tilde - params.eta * gt;
    y_tilde = y_next + params.theta * (y_next - y);
    y = std::move(y_next);
    ++k;
    g = checked_grad(h_grad, y, k);
  }
  return {y, g.norm(), k};
}

double agd_rate_bound(double kappa_h, std::int64_t K, double dist0) {
  if (!(kappa_h >= 1.0)) throw std::invalid_argument("agd: kappa_h must be at least 1");
  if (K < 0) throw std::invalid_argument("agd: K must be non-negative");
  const double factor = 1.0 - 1.0 / std::sqrt(kappa_h);
  if (K == 0) return std::sqrt(kappa_h + 1.0) * dist0;
  if (factor <= 0.0) return 0.0;
  return std::sqrt(kappa_h + 1.0) * std::pow(factor, 0.5 * static_cast<double>(K)) * dist0;
}

std::int64_t agd_iters_for(double kappa_h, double dist0, double target) {
  if (!(kappa_h >= 1.0)) throw std::invalid_argument("agd: kappa_h must be at least 1");
  if (!(target > 0.0)) throw std::invalid_argument("agd: target must be positive");
  if (!(dist0 >= 0.0)) throw std::invalid_argument("agd: dist0 must be non-negative");
  if (agd_rate_bound(kappa_h, 0, dist0) <= target) return 0;
  const double factor = 1.0 - 1.0 / std::sqrt(kappa_h);
  if (factor <= 0.0) return 1;
  // sqrt(k+1) f^(K/2) d <= t  <=>  K >= 2 log(sqrt(k+1) d / t) / -log f
  const double ratio = std::log(std::sqrt(kappa_h + 1.0) * dist0 / target);
  const double k_real = 2.0 * ratio / -std::log(factor);
  auto K = static_cast<std::int64_t>(std::max(0.0, std::floor(k_real) - 1.0));
  // The closed form can be off by one in floating point; settle it exactly.
  while (agd_rate_bound(kappa_h, K, dist0) > target) ++K;
  return K;
}

}  // namespace minimax_cubic
