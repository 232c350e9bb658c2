#pragma once

#include <vector>

#include "minimax_cubic/problem.hpp"

namespace minimax_cubic {

/// Chebyshev series coefficients for the inverse of an SPD matrix with
/// spectrum in [mu_p, ell_p]:
///   c_k = 2 / sqrt(ell_p mu_p) * q^k,  q = (sqrt(ell_p/mu_p) - 1) / (sqrt(ell_p/mu_p) + 1).
std::vector<double> cheb_coefficients(double ell_p, double mu_p, int Kp);

/// Operator-norm error of the degree-Kp truncation. Zero when ell_p == mu_p.
double cheb_error_bound(double ell_p, double mu_p, int Kp);

/// (c_0/2) I + sum_{k=1}^{Kp} c_k T_k(Z'),  Z' = 2/(ell_p - mu_p) ((ell_p + mu_p)/2 I - X),
/// built densely. Returns X^{-1} = I / ell_p when ell_p == mu_p.
Matrix cheb_dense_inverse(const Matrix& X, double ell_p, double mu_p, int Kp);

/// Degree-Kp approximation of (-Hyy)^{-1} for a problem with constants
/// (ell, mu). The spectrum of X = -Hyy / (2 ell) lies in [mu/(2 ell), 1/2],
/// so the series runs in those scaled constants.
struct ChebyshevPlan {
  double ell = 1.0;
  double mu = 1.0;
  int Kp = 0;
  std::vector<double> coeffs;  // in the scaled constants; empty when ell == mu

  double ell_scaled() const { return 0.5; }
  double mu_scaled() const { return mu / (2.0 * ell); }
  /// Error bound on |(-Hyy)^{-1} - approximation|.
  double inverse_error_bound() const;
};

ChebyshevPlan make_chebyshev_plan(double ell, double mu, int Kp);

/// Applies the approximation of (-Hyy(x, y))^{-1} to u with Kp Hessian-vector
/// calls on the yy block (none when ell == mu).
Vector approx_neg_yy_inverse_apply(const MinimaxProblem& p, const Vector& x, const Vector& y,
                                   int Kp, const Vector& u);

/// Hxx u + Hxy A Hyx u with A the approximate inverse above. Costs Kp + 3
/// Hessian-vector calls, or 3 when ell == mu.
Vector hvp_primal(const MinimaxProblem& p, const Vector& x, const Vector& y, int Kp,
                  const Vector& u_prime);

/// Matrix whose i-th column is hvp_primal(e_i).
Matrix build_dense_Ht(const MinimaxProblem& p, const Vector& x, const Vector& y, int Kp);

/// The same matrix assembled from dense Hessian blocks with the polynomial
/// built by the three-term matrix recurrence. Test oracle.
Matrix dense_Ht_reference(const HessianBlocks& h, double ell, double mu, int Kp);

}  // namespace minimax_cubic
