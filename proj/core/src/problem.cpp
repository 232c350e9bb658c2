#include "minimax_cubic/problem.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace minimax_cubic {

DerivedConstants derive_constants(const SmoothnessConstants& c) {
  if (!(c.ell > 0.0) || !(c.mu > 0.0) || !(c.rho > 0.0)) {
    throw std::invalid_argument("smoothness constants must be positive");
  }
  if (c.mu > c.ell) {
    std::ostringstream msg;
    msg << "mu (" << c.mu << ") exceeds ell (" << c.ell << "): condition number would be below 1";
    throw std::invalid_argument(msg.str());
  }
  DerivedConstants d;
  d.kappa = c.ell / c.mu;
  d.L = 2.0 * d.kappa * c.ell;
  d.M = 4.0 * std::sqrt(2.0) * d.kappa * d.kappa * d.kappa * c.rho;
  return d;
}

DerivedConstants derive_constants(const MinimaxProblem& p) { return derive_constants(p.constants()); }

CounterSnapshot operator-(const CounterSnapshot& a, const CounterSnapshot& b) {
  return {a.n_grad - b.n_grad, a.n_hvp - b.n_hvp, a.n_hess - b.n_hess, a.n_value - b.n_value};
}

CounterSnapshot OracleCounters::snapshot() const {
  return {n_grad_.load(std::memory_order_relaxed), n_hvp_.load(std::memory_order_relaxed),
          n_hess_.load(std::memory_order_relaxed), n_value_.load(std::memory_order_relaxed)};
}

MinimaxProblem::MinimaxProblem(int dim_x, int dim_y, ProblemOracles oracles,
                               SmoothnessConstants constants)
    : dim_x_(dim_x),
      dim_y_(dim_y),
      oracles_(std::make_shared<const ProblemOracles>(std::move(oracles))),
      constants_(constants),
      counters_(std::make_shared<OracleCounters>()) {
  if (dim_x <= 0 || dim_y <= 0) throw std::invalid_argument("problem dimensions must be positive");
  if (!oracles_->value || !oracles_->grad_x || !oracles_->grad_y || !oracles_->hessian) {
    throw std::invalid_argument("value, grad_x, grad_y and hessian oracles are required");
  }
  derive_constants(constants_);  // validates
}

MinimaxProblem MinimaxProblem::with_fresh_counters() const {
  MinimaxProblem copy = *this;
  copy.counters_ = std::make_shared<OracleCounters>();
  return copy;
}

void MinimaxProblem::check_point(const Vector& x, const Vector& y) const {
  if (x.size() != dim_x_ || y.size() != dim_y_) {
    std::ostringstream msg;
    msg << "point dimension mismatch: got (" << x.size() << ", " << y.size() << "), expected ("
        << dim_x_ << ", " << dim_y_ << ")";
    throw std::invalid_argument(msg.str());
  }
}

HessianBlocks MinimaxProblem::raw_hessian(const Vector& x, const Vector& y) const {
  HessianBlocks h = oracles_->hessian(x, y);
  if (h.xx.rows() != dim_x_ || h.xx.cols() != dim_x_ || h.xy.rows() != dim_x_ ||
      h.xy.cols() != dim_y_ || h.yy.rows() != dim_y_ || h.yy.cols() != dim_y_) {
    throw std::invalid_argument("hessian oracle returned blocks of the wrong shape");
  }
  return h;
}

double MinimaxProblem::value(const Vector& x, const Vector& y) const {
  check_point(x, y);
  counters_->add_value();
  return oracles_->value(x, y);
}

Vector MinimaxProblem::grad_x(const Vector& x, const Vector& y) const {
  check_point(x, y);
  counters_->add_grad();
  return oracles_->grad_x(x, y);
}

Vector MinimaxProblem::grad_y(const Vector& x, const Vector& y) const {
  check_point(x, y);
  counters_->add_grad();
  return oracles_->grad_y(x, y);
}

HessianBlocks MinimaxProblem::hessian(const Vector& x, const Vector& y) const {
  check_point(x, y);
  counters_->add_hess();
  return raw_hessian(x, y);
}

Vector MinimaxProblem::hvp_xx(const Vector& x, const Vector& y, const Vector& v) const {
  check_point(x, y);
  if (v.size() != dim_x_) throw std::invalid_argument("hvp_xx: vector must have length d_x");
  counters_->add_hvp();
  if (oracles_->hvp_xx) return oracles_->hvp_xx(x, y, v);
  return raw_hessian(x, y).xx * v;
}

Vector MinimaxProblem::hvp_xy(const Vector& x, const Vector& y, const Vector& v) const {
  check_point(x, y);
  if (v.size() != dim_y_) throw std::invalid_argument("hvp_xy: vector must have length d_y");
  counters_->add_hvp();
  if (oracles_->hvp_xy) return oracles_->hvp_xy(x, y, v);
  return raw_hessian(x, y).xy * v;
}

Vector MinimaxProblem::hvp_yx(const Vector& x, const Vector& y, const Vector& v) const {
  check_point(x, y);
  if (v.size() != dim_x_) throw std::invalid_argument("hvp_yx: vector must have length d_x");
  counters_->add_hvp();
  if (oracles_->hvp_yx) return oracles_->hvp_yx(x, y, v);
  return raw_hessian(x, y).xy.transpose() * v;
}

Vector MinimaxProblem::hvp_yy(const Vector& x, const Vector& y, const Vector& v) const {
  check_point(x, y);
  if (v.size() != dim_y_) throw std::invalid_argument("hvp_yy: vector must have length d_y");
  counters_->add_hvp();
  if (oracles_->hvp_yy) return oracles_->hvp_yy(x, y, v);
  return raw_hessian(x, y).yy * v;
}

// ---------------------------------------------------------------------------
// Quadratic problem

namespace {

Matrix full_hessian(const Matrix& xx, const Matrix& xy, const Matrix& yy) {
  const auto dx = xx.rows();
  const auto dy = yy.rows();
  Matrix h(dx + dy, dx + dy);
  h.topLeftCorner(dx, dx) = xx;
  h.topRightCorner(dx, dy) = xy;
  h.bottomLeftCorner(dy, dx) = xy.transpose();
  h.bottomRightCorner(dy, dy) = yy;
  return h;
}

bool is_symmetric(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
}

}  // namespace

ProblemInstance make_quadratic_problem(const QuadraticSpec& spec) {
  const auto dx = spec.A.rows();
  const auto dy = spec.C.rows();
  if (dx == 0 || dy == 0) throw std::invalid_argument("quadratic problem: A and C must be non-empty");
  if (spec.A.cols() != dx || spec.C.cols() != dy) {
    throw std::invalid_argument("quadratic problem: A and C must be square");
  }
  if (spec.B.rows() != dx || spec.B.cols() != dy) {
    throw std::invalid_argument("quadratic problem: B must be d_x x d_y");
  }
  if (spec.a.size() != dx || spec.b.size() != dy) {
    throw std::invalid_argument("quadratic problem: a must have length d_x and b length d_y");
  }
  if (!is_symmetric(spec.A) || !is_symmetric(spec.C)) {
    throw std::invalid_argument("quadratic problem: A and C must be symmetric");
  }

  const Matrix A = 0.5 * (spec.A + spec.A.transpose());
  const Matrix C = 0.5 * (spec.C + spec.C.transpose());
  const Matrix B = spec.B;
  const Vector a = spec.a;
  const Vector b = spec.b;

  const double c_min = min_eigenvalue(C);
  if (!(c_min > 0.0)) {
    std::ostringstream msg;
    msg << "quadratic problem: C must be positive definite (smallest eigenvalue " << c_min << ")";
    throw std::invalid_argument(msg.str());
  }
  Eigen::LLT<Matrix> c_llt(C);
  if (c_llt.info() != Eigen::Success) {
    throw std::invalid_argument("quadratic problem: Cholesky factorization of C failed");
  }

  const double hess_norm = spectral_norm(full_hessian(A, B, -C));
  SmoothnessConstants k;
  k.mu = spec.mu.value_or(c_min);
  k.ell = spec.ell.value_or(std::max(hess_norm, k.mu));
  k.rho = spec.rho.value_or(1.0);
  if (k.mu > c_min * (1.0 + 1e-12)) {
    throw std::invalid_argument("quadratic problem: declared mu exceeds the smallest eigenvalue of C");
  }
  if (k.ell < hess_norm * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "quadratic problem: declared ell (" << k.ell << ") is below the Hessian norm ("
        << hess_norm << ")";
    throw std::invalid_argument(msg.str());
  }

  ProblemOracles o;
  o.value = [=](const Vector& x, const Vector& y) {
    return 0.5 * x.dot(A * x) + a.dot(x) + x.dot(B * y) - 0.5 * y.dot(C * y) + b.dot(y);
  };
  o.grad_x = [=](const Vector& x, const Vector& y) -> Vector { return A * x + a + B * y; };
  o.grad_y = [=](const Vector& x, const Vector& y) -> Vector {
    return B.transpose() * x - C * y + b;
  };
  o.hessian = [=](const Vector&, const Vector&) { return HessianBlocks{A, B, -C}; };
  o.hvp_xx = [=](const Vector&, const Vector&, const Vector& v) -> Vector { return A * v; };
  o.hvp_xy = [=](const Vector&, const Vector&, const Vector& v) -> Vector { return B * v; };
  o.hvp_yx = [=](const Vector&, const Vector&, const Vector& v) -> Vector {
    return B.transpose() * v;
  };
  o.hvp_yy = [=](const Vector&, const Vector&, const Vector& v) -> Vector { return -(C * v); };

  // P(x) = 1/2 x'Sx + r'x + 1/2 b'C^{-1}b with S = A + B C^{-1} B', r = a + B C^{-1} b.
  const Matrix c_inv_bt = c_llt.solve(Matrix(B.transpose()));
  const Vector c_inv_b = c_llt.solve(b);
  Matrix S = A + B * c_inv_bt;
  S = 0.5 * (S + S.transpose());
  const Vector r = a + B * c_inv_b;
  const double offset = 0.5 * b.dot(c_inv_b);

  ClosedForms cf;
  cf.y_star = [=](const Vector& x) -> Vector { return c_inv_bt * x + c_inv_b; };
  cf.primal = [=](const Vector& x) { return 0.5 * x.dot(S * x) + r.dot(x) + offset; };
  cf.primal_grad = [=](const Vector& x) -> Vector { return S * x + r; };
  cf.primal_hessian = [=](const Vector&) -> Matrix { return S; };
  Eigen::LLT<Matrix> s_llt(S);
  if (s_llt.info() == Eigen::Success && min_eigenvalue(S) > 0.0) {
    const Vector x_min = s_llt.solve(-r);
    cf.minimizer = x_min;
    cf.primal_min = 0.5 * x_min.dot(S * x_min) + r.dot(x_min) + offset;
  }

  return {MinimaxProblem(static_cast<int>(dx), static_cast<int>(dy), std::move(o), k), std::move(cf)};
}

// ---------------------------------------------------------------------------
// Quartic-well saddle problem

SmoothnessConstants saddle_box_constants(const SaddleSpec& spec) {
  if (!(spec.mu > 0.0)) throw std::invalid_argument("saddle problem: mu must be positive");
  if (!(spec.box_radius > 0.0)) throw std::invalid_argument("saddle problem: box radius must be positive");
  const double R = spec.box_radius;
  const double coupling_norm = spec.coupling.size() == 0 ? 0.0 : spectral_norm(spec.coupling);
  // |3 x_i^2 - 1| on the box, then the off-diagonal block on top.
  const double xx_norm = std::max(3.0 * R * R - 1.0, 1.0);
  SmoothnessConstants k;
  k.mu = spec.mu;
  const double ell_box = std::max(xx_norm, spec.mu) + coupling_norm;
  // |3 x_i^2 - 3 x_i'^2| <= 6R |x_i - x_i'|
  const double rho_box = 6.0 * R;
  k.ell = spec.ell.value_or(ell_box);
  k.rho = spec.rho.value_or(rho_box);
  if (k.ell < ell_box * (1.0 - 1e-12)) {
    throw std::invalid_argument("saddle problem: declared ell is below its value on the box");
  }
  if (k.rho < rho_box * (1.0 - 1e-12)) {
    throw std::invalid_argument("saddle problem: declared rho is below its value on the box");
  }
  return k;
}

ProblemInstance make_saddle_problem(const SaddleSpec& spec) {
  if (spec.dim_x <= 0 || spec.dim_y <= 0) {
    throw std::invalid_argument("saddle problem: dimensions must be positive");
  }
  const int dx = spec.dim_x;
  const int dy = spec.dim_y;
  const Matrix B = spec.coupling.size() == 0 ? Matrix::Zero(dx, dy) : spec.coupling;
  if (B.rows() != dx || B.cols() != dy) {
    throw std::invalid_argument("saddle problem: coupling must be d_x x d_y");
  }
  SaddleSpec resolved = spec;
  resolved.coupling = B;
  const SmoothnessConstants k = saddle_box_constants(resolved);
  const double mu = spec.mu;

  auto well = [](const Vector& x) {
    return 0.25 * (x.array().square() - 1.0).square().sum();
  };
  auto well_grad = [](const Vector& x) -> Vector {
    return (x.array().square() - 1.0).cwiseProduct(x.array()).matrix();
  };
  auto well_curv = [](const Vector& x) -> Vector { return (3.0 * x.array().square() - 1.0).matrix(); };

  ProblemOracles o;
  o.value = [=](const Vector& x, const Vector& y) {
    return well(x) + x.dot(B * y) - 0.5 * mu * y.squaredNorm();
  };
  o.grad_x = [=](const Vector& x, const Vector& y) -> Vector { return well_grad(x) + B * y; };
  o.grad_y = [=](const Vector& x, const Vector& y) -> Vector {
    return B.transpose() * x - mu * y;
  };
  o.hessian = [=](const Vector& x, const Vector&) {
    return HessianBlocks{Matrix(well_curv(x).asDiagonal()), B,
                         Matrix(-mu * Matrix::Identity(dy, dy))};
  };
  o.hvp_xx = [=](const Vector& x, const Vector&, const Vector& v) -> Vector {
    return well_curv(x).cwiseProduct(v);
  };
  o.hvp_xy = [=](const Vector&, const Vector&, const Vector& v) -> Vector { return B * v; };
  o.hvp_yx = [=](const Vector&, const Vector&, const Vector& v) -> Vector {
    return B.transpose() * v;
  };
  o.hvp_yy = [=](const Vector&, const Vector&, const Vector& v) -> Vector { return -mu * v; };

  const Matrix BBt = B * B.transpose() / mu;
  ClosedForms cf;
  cf.y_star = [=](const Vector& x) -> Vector { return B.transpose() * x / mu; };
  cf.primal = [=](const Vector& x) {
    return well(x) + (B.transpose() * x).squaredNorm() / (2.0 * mu);
  };
  cf.primal_grad = [=](const Vector& x) -> Vector { return well_grad(x) + BBt * x; };
  cf.primal_hessian = [=](const Vector& x) -> Matrix {
    return Matrix(well_curv(x).asDiagonal()) + BBt;
  };
  cf.strict_saddle = Vector::Zero(dx);
  if (B.cwiseAbs().maxCoeff() == 0.0) {
    cf.primal_min = 0.0;
    cf.minimizer = Vector::Ones(dx);
  }
  return {MinimaxProblem(dx, dy, std::move(o), k), std::move(cf)};
}

}  // namespace minimax_cubic
