#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>

#include "minimax_cubic/problem.hpp"

namespace minimax_cubic {

/// Hxx - Hxy Hyy^{-1} Hyx through a Cholesky factor of -Hyy. With
/// `symmetrize` the result is assembled as Hxx + W'W (W = L^{-1} Hyx) and then
/// symmetrized; without it the product Hxy (-Hyy)^{-1} Hyx is formed from two
/// triangular solves and returned as is. Throws NumericalError if -Hyy is not
/// positive definite.
Matrix schur_complement(const HessianBlocks& h, bool symmetrize = true);

/// max |S - S'| of the unsymmetrized Schur complement, relative to max |S|.
double schur_symmetry_defect(const HessianBlocks& h);

struct PrimalEval {
  double value = 0.0;             // f(x, y_hat)
  Vector y;                       // y_hat
  double inner_accuracy = 0.0;    // |grad_y f(x, y_hat)|
  std::int64_t iterations = 0;
};

/// Maximizes f(x, .) by AGD until |grad_y f| <= inner_tol * mu, so that
/// |y_hat - y*(x)| <= inner_tol.
PrimalEval eval_primal(const MinimaxProblem& p, const Vector& x, double inner_tol,
                       const std::optional<Vector>& y_init = std::nullopt,
                       std::int64_t max_iters = 1'000'000);

/// grad_x f(x, y_hat).
Vector grad_P(const MinimaxProblem& p, const Vector& x, double inner_tol);

/// Schur complement at (x, y_hat), symmetrized.
Matrix hess_P(const MinimaxProblem& p, const Vector& x, double inner_tol);

struct StationarityReport {
  double grad_norm = 0.0;
  double min_eig = 0.0;
  double eps = 0.0;
  double delta_2nd = 0.0;
  bool fsp_pass = false;
  bool ssp_pass = false;
  double inner_accuracy = 0.0;
};

StationarityReport check_stationarity(const MinimaxProblem& p, const Vector& x, double eps,
                                      double delta_2nd, double inner_tol);

using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;

inline constexpr double kFdGradStep = 1e-5;
inline constexpr double kFdHessStep = 1e-4;

/// Central-difference gradient.
Vector fd_gradient(const ScalarFn& fn, const Vector& x, double h = kFdGradStep);

/// Central-difference Jacobian; column i is dF/dx_i.
Matrix fd_jacobian(const VectorFn& fn, const Vector& x, double h = kFdHessStep);

/// Central second differences of a scalar function, symmetrized.
Matrix fd_hessian(const ScalarFn& fn, const Vector& x, double h = kFdHessStep);

/// Draws a point (x, y).
using PointSampler = std::function<std::pair<Vector, Vector>(std::mt19937_64&)>;

/// Uniform in the boxes |x|_inf <= rx, |y|_inf <= ry.
PointSampler box_sampler(int dim_x, int dim_y, double rx, double ry);

struct LipschitzEstimate {
  double ell_hat = 0.0;           // grad f
  double rho_hat = 0.0;           // Hessian of f
  double P_grad_lip_hat = 0.0;    // grad P
  double P_hess_lip_hat = 0.0;    // Hessian of P
  double schur_y_lip_hat = 0.0;   // Schur complement in y at fixed x

  double ell = 0.0;               // the matching theoretical constants
  double rho = 0.0;
  double P_grad_lip = 0.0;        // (kappa + 1) ell
  double P_hess_lip = 0.0;        // 4 sqrt(2) kappa^3 rho
  double schur_y_lip = 0.0;       // 3 kappa^2 rho

  bool within_bounds(double slack = 0.0) const;
};

/// Largest observed difference quotients over n_samples pairs drawn from the
/// sampler. Primal quantities use inner_tol-accurate maximizers.
LipschitzEstimate estimate_lipschitz(const MinimaxProblem& p, const PointSampler& sampler,
                                     int n_samples, std::uint64_t rng_seed,
                                     double inner_tol = 1e-10);

}  // namespace minimax_cubic
