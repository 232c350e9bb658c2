#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "minimax_cubic/types.hpp"

namespace minimax_cubic {

/// Second-order blocks of f at (x, y). The yx block is xy transposed.
struct HessianBlocks {
  Matrix xx;  // d_x x d_x
  Matrix xy;  // d_x x d_y
  Matrix yy;  // d_y x d_y
};

/// User-supplied callbacks for f(x, y). Hessian-vector callbacks may be left
/// empty, in which case they are served from `hessian`.
struct ProblemOracles {
  using Scalar2 = std::function<double(const Vector&, const Vector&)>;
  using Vector2 = std::function<Vector(const Vector&, const Vector&)>;
  using Blocks2 = std::function<HessianBlocks(const Vector&, const Vector&)>;
  using Hvp = std::function<Vector(const Vector&, const Vector&, const Vector&)>;

  Scalar2 value;
  Vector2 grad_x;
  Vector2 grad_y;
  Blocks2 hessian;
  Hvp hvp_xx;  // (x, y, v in R^dx) -> Hxx v
  Hvp hvp_xy;  // (x, y, v in R^dy) -> Hxy v
  Hvp hvp_yx;  // (x, y, v in R^dx) -> Hyx v
  Hvp hvp_yy;  // (x, y, v in R^dy) -> Hyy v
};

/// ell: gradient Lipschitz constant; mu: strong concavity in y;
/// rho: Hessian Lipschitz constant.
struct SmoothnessConstants {
  double ell = 1.0;
  double mu = 1.0;
  double rho = 1.0;
};

struct DerivedConstants {
  double kappa = 1.0;  // ell / mu
  double L = 2.0;      // 2 kappa ell, gradient Lipschitz constant used for P
  double M = 0.0;      // 4 sqrt(2) kappa^3 rho, Hessian Lipschitz constant of P
};

DerivedConstants derive_constants(const SmoothnessConstants& c);

struct CounterSnapshot {
  std::int64_t n_grad = 0;
  std::int64_t n_hvp = 0;
  std::int64_t n_hess = 0;
  std::int64_t n_value = 0;

  friend bool operator==(const CounterSnapshot&, const CounterSnapshot&) = default;
};

CounterSnapshot operator-(const CounterSnapshot& a, const CounterSnapshot& b);

/// Thread-safe oracle call tallies. One increment per oracle invocation.
class OracleCounters {
 public:
  void add_grad() { n_grad_.fetch_add(1, std::memory_order_relaxed); }
  void add_hvp() { n_hvp_.fetch_add(1, std::memory_order_relaxed); }
  void add_hess() { n_hess_.fetch_add(1, std::memory_order_relaxed); }
  void add_value() { n_value_.fetch_add(1, std::memory_order_relaxed); }
  CounterSnapshot snapshot() const;

 private:
  std::atomic<std::int64_t> n_grad_{0};
  std::atomic<std::int64_t> n_hvp_{0};
  std::atomic<std::int64_t> n_hess_{0};
  std::atomic<std::int64_t> n_value_{0};
};

/// Oracle bundle for min_x max_y f(x, y) with smoothness metadata.
///
/// Callbacks are only reachable through the counting accessors below. Copies
/// share the callbacks and the counters; `with_fresh_counters` gives a copy
/// with its own tallies, which is how drivers isolate the accounting of one
/// run.
class MinimaxProblem {
 public:
  MinimaxProblem(int dim_x, int dim_y, ProblemOracles oracles,
                 SmoothnessConstants constants);

  int dim_x() const { return dim_x_; }
  int dim_y() const { return dim_y_; }
  const SmoothnessConstants& constants() const { return constants_; }
  double ell() const { return constants_.ell; }
  double mu() const { return constants_.mu; }
  double rho() const { return constants_.rho; }
  DerivedConstants derived() const { return derive_constants(constants_); }

  double value(const Vector& x, const Vector& y) const;
  Vector grad_x(const Vector& x, const Vector& y) const;
  Vector grad_y(const Vector& x, const Vector& y) const;
  HessianBlocks hessian(const Vector& x, const Vector& y) const;
  Vector hvp_xx(const Vector& x, const Vector& y, const Vector& v) const;
  Vector hvp_xy(const Vector& x, const Vector& y, const Vector& v) const;
  Vector hvp_yx(const Vector& x, const Vector& y, const Vector& v) const;
  Vector hvp_yy(const Vector& x, const Vector& y, const Vector& v) const;

  CounterSnapshot counters() const { return counters_->snapshot(); }
  MinimaxProblem with_fresh_counters() const;

 private:
  void check_point(const Vector& x, const Vector& y) const;
  HessianBlocks raw_hessian(const Vector& x, const Vector& y) const;

  int dim_x_;
  int dim_y_;
  std::shared_ptr<const ProblemOracles> oracles_;
  SmoothnessConstants constants_;
  std::shared_ptr<OracleCounters> counters_;
};

DerivedConstants derive_constants(const MinimaxProblem& p);

/// Analytic companions of a built-in problem. Any member may be empty.
struct ClosedForms {
  std::function<Vector(const Vector&)> y_star;
  std::function<double(const Vector&)> primal;
  std::function<Vector(const Vector&)> primal_grad;
  std::function<Matrix(const Vector&)> primal_hessian;
  std::optional<double> primal_min;      // P*
  std::optional<Vector> minimizer;       // a global minimizer of P
  std::optional<Vector> strict_saddle;   // a known strict saddle of P
};

struct ProblemInstance {
  MinimaxProblem problem;
  ClosedForms closed;
};

/// f(x, y) = 1/2 x'Ax + a'x + x'By - 1/2 y'Cy + b'y.
struct QuadraticSpec {
  Matrix A;
  Matrix B;
  Matrix C;
  Vector a;
  Vector b;
  std::optional<double> ell;  // default: spectral norm of the full Hessian
  std::optional<double> mu;   // default: smallest eigenvalue of C
  std::optional<double> rho;  // default: 1 (the true Hessian is constant)
};

ProblemInstance make_quadratic_problem(const QuadraticSpec& spec);

enum class WellKind { quartic };

/// f(x, y) = w(x) + x'By - mu/2 |y|^2 with w(x) = 1/4 sum_i (x_i^2 - 1)^2.
///
/// w has unbounded curvature, so ell and rho are computed on the box
/// |x|_inf <= box_radius and are only valid there.
struct SaddleSpec {
  int dim_x = 1;
  int dim_y = 1;
  Matrix coupling;  // d_x x d_y; empty means zero coupling
  double mu = 1.0;
  WellKind well = WellKind::quartic;
  double box_radius = 3.0;
  std::optional<double> ell;  // must dominate the box value when given
  std::optional<double> rho;  // must dominate the box value when given
};

ProblemInstance make_saddle_problem(const SaddleSpec& spec);

/// Constants the saddle problem reports for a given spec.
SmoothnessConstants saddle_box_constants(const SaddleSpec& spec);

}  // namespace minimax_cubic
