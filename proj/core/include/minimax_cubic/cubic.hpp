#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include "minimax_cubic/types.hpp"

namespace minimax_cubic {

/// Symmetric linear map v -> Hv.
using LinearOperator = std::function<Vector(const Vector&)>;

/// m(s) = g's + 1/2 s'Hs + (M/6)|s|^3 with H dense or matrix-free.
struct CubicModel {
  Vector g;
  std::variant<Matrix, LinearOperator> H;
  double M = 1.0;

  int dim() const { return static_cast<int>(g.size()); }
  bool is_dense() const { return std::holds_alternative<Matrix>(H); }
  const Matrix& dense() const;  // throws std::invalid_argument in operator form
  Vector apply(const Vector& v) const;
};

struct CubicSolution {
  Vector s;
  double model_value = 0.0;           // m(s), always with the unperturbed g
  double residual = 0.0;              // |g + Hs + (M/2)|s| s|
  std::optional<double> lam;          // (M/2)|s|, exact solver only
  std::int64_t iterations = 0;        // inner steps taken by iterative solvers
  bool hard_case = false;             // exact solver only
};

double cubic_model_value(const CubicModel& m, const Vector& s);

/// |g + Hs + (M/2)|s| s|.
double cubic_residual(const CubicModel& m, const Vector& s);

/// Global minimizer by eigendecomposition and a safeguarded Newton search on
/// the secular equation |(H + lam I)^{-1} g| = 2 lam / M.
CubicSolution solve_cubic_exact(const CubicModel& m, double tol = 1e-10);

/// Minimizer of the model along -g. Requires g != 0. Costs one product with H.
CubicSolution cauchy_point(const CubicModel& m);

/// Perturbed gradient descent from s = 0 with step 1/(20L) on the model
/// whose linear term is g + sigma * zeta, zeta uniform on the unit sphere.
///
/// Runs at most K_max steps and stops early once an update no longer moves
/// the iterate beyond a few ulps of |s|.
CubicSolution cubic_solver_gd(const CubicModel& m, double L, double sigma, std::int64_t K_max,
                              std::uint64_t seed);

/// Default cap ceil(100 L^2 / (M eps) * (1 + log(1 + |g|))).
std::int64_t final_solver_cap(double L, double M, double eps, double g_norm);

/// Gradient descent from s = 0 until the model gradient drops below eps/2.
/// Throws IterationCapError after iter_cap steps.
Vector final_cubic_solver(const CubicModel& m, double L, double eps, std::int64_t iter_cap);

/// Step budget of the perturbed solver for accuracy eps and failure
/// probability delta_p.
std::int64_t iteration_budget(double eps, double delta_p, double L, double M, double C_sigma,
                              double C_H, int d);

/// Perturbation radius C_sigma M^2 sqrt(eps^3/M^3) / (4608 (4L + sqrt(M eps))).
double sigma_value(double eps, double L, double M, double C_sigma);

/// Uniform direction on the unit sphere in R^d from a seed.
Vector sphere_sample(int d, std::uint64_t seed);

/// Deterministic mix of a base seed with a stream index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace minimax_cubic
