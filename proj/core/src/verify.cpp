#include "minimax_cubic/verify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "minimax_cubic/agd.hpp"

namespace minimax_cubic {

namespace {

Eigen::LLT<Matrix> factor_neg_yy(const HessianBlocks& h) {
  Eigen::LLT<Matrix> llt(-h.yy);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("schur complement: -Hyy is not positive definite");
  }
  return llt;
}

}  // namespace

Matrix schur_complement(const HessianBlocks& h, bool symmetrize) {
  const auto llt = factor_neg_yy(h);
  if (!symmetrize) return h.xx + h.xy * llt.solve(Matrix(h.xy.transpose()));
  const Matrix W = llt.matrixL().solve(Matrix(h.xy.transpose()));
  Matrix S = h.xx + W.transpose() * W;
  return 0.5 * (S + S.transpose());
}

double schur_symmetry_defect(const HessianBlocks& h) {
  const Matrix S = schur_complement(h, false);
  const double scale = std::max(S.cwiseAbs().maxCoeff(), 1e-300);
  return (S - S.transpose()).cwiseAbs().maxCoeff() / scale;
}

PrimalEval eval_primal(const MinimaxProblem& p, const Vector& x, double inner_tol,
                       const std::optional<Vector>& y_init, std::int64_t max_iters) {
  if (!(inner_tol > 0.0)) throw std::invalid_argument("eval_primal: inner_tol must be positive");
  const Vector y0 = y_init.value_or(Vector::Zero(p.dim_y()));
  const AgdParams params = agd_params_for(p.ell(), p.mu(), 0);
  const auto res = agd_minimize_until([&](const Vector& y) -> Vector { return -p.grad_y(x, y); },
                                      y0, params, inner_tol * p.mu(), max_iters);
  PrimalEval out;
  out.y = res.y;
  out.inner_accuracy = res.grad_norm;
  out.iterations = res.iterations;
  out.value = p.value(x, res.y);
  return out;
}

Vector grad_P(const MinimaxProblem& p, const Vector& x, double inner_tol) {
  const auto e = eval_primal(p, x, inner_tol);
  return p.grad_x(x, e.y);
}

Matrix hess_P(const MinimaxProblem& p, const Vector& x, double inner_tol) {
  const auto e = eval_primal(p, x, inner_tol);
  return schur_complement(p.hessian(x, e.y));
}

StationarityReport check_stationarity(const MinimaxProblem& p, const Vector& x, double eps,
                                      double delta_2nd, double inner_tol) {
  if (!(eps > 0.0) || !(delta_2nd > 0.0)) {
    throw std::invalid_argument("check_stationarity: thresholds must be positive");
  }
  const auto e = eval_primal(p, x, inner_tol);
  StationarityReport r;
  r.eps = eps;
  r.delta_2nd = delta_2nd;
  r.inner_accuracy = e.inner_accuracy;
  r.grad_norm = p.grad_x(x, e.y).norm();
  r.min_eig = min_eigenvalue(schur_complement(p.hessian(x, e.y)));
  r.fsp_pass = r.grad_norm <= eps;
  r.ssp_pass = r.fsp_pass && r.min_eig >= -delta_2nd;
  return r;
}

Vector fd_gradient(const ScalarFn& fn, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = fn(xp);
    xp(i) = x(i) - h;
    const double fm = fn(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix fd_jacobian(const VectorFn& fn, const Vector& x, double h) {
  Vector xp = x;
  Matrix J;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const Vector fp = fn(xp);
    xp(i) = x(i) - h;
    const Vector fm = fn(xp);
    xp(i) = x(i);
    if (i == 0) J.resize(fp.size(), x.size());
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

Matrix fd_hessian(const ScalarFn& fn, const Vector& x, double h) {
  const auto d = x.size();
  Matrix H(d, d);
  const double f0 = fn(x);
  Vector z = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    z(i) = x(i) + h;
    const double fp = fn(z);
    z(i) = x(i) - h;
    const double fm = fn(z);
    z(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          z(i) = x(i) + si * h;
          z(j) = x(j) + sj * h;
          acc += si * sj * fn(z);
        }
      }
      z(i) = x(i);
      z(j) = x(j);
      H(i, j) = H(j, i) = acc / (4.0 * h * h);
    }
  }
  return H;
}

PointSampler box_sampler(int dim_x, int dim_y, double rx, double ry) {
  return [=](std::mt19937_64& gen) {
    std::uniform_real_distribution<double> ux(-rx, rx);
    std::uniform_real_distribution<double> uy(-ry, ry);
    Vector x(dim_x);
    Vector y(dim_y);
    for (int i = 0; i < dim_x; ++i) x(i) = ux(gen);
    for (int i = 0; i < dim_y; ++i) y(i) = uy(gen);
    return std::make_pair(x, y);
  };
}

bool LipschitzEstimate::within_bounds(double slack) const {
  auto ok = [slack](double hat, double bound) { return hat <= bound * (1.0 + slack); };
  return ok(ell_hat, ell) && ok(rho_hat, rho) && ok(P_grad_lip_hat, P_grad_lip) &&
         ok(P_hess_lip_hat, P_hess_lip) && ok(schur_y_lip_hat, schur_y_lip);
}

namespace {

Matrix full_hessian(const HessianBlocks& h) {
  const auto dx = h.xx.rows();
  const auto dy = h.yy.rows();
  Matrix m(dx + dy, dx + dy);
  m << h.xx, h.xy, h.xy.transpose(), h.yy;
  return m;
}

Vector stack(const Vector& a, const Vector& b) {
  Vector v(a.size() + b.size());
  v << a, b;
  return v;
}

}  // namespace

LipschitzEstimate estimate_lipschitz(const MinimaxProblem& p, const PointSampler& sampler,
                                     int n_samples, std::uint64_t rng_seed, double inner_tol) {
  if (n_samples <= 0) throw std::invalid_argument("estimate_lipschitz: n_samples must be positive");
  std::mt19937_64 gen(rng_seed);
  const auto k = p.derived();
  LipschitzEstimate est;
  est.ell = p.ell();
  est.rho = p.rho();
  est.P_grad_lip = (k.kappa + 1.0) * p.ell();
  est.P_hess_lip = k.M;
  est.schur_y_lip = 3.0 * k.kappa * k.kappa * p.rho();

  for (int n = 0; n < n_samples; ++n) {
    const auto [x1, y1] = sampler(gen);
    const auto [x2, y2] = sampler(gen);

    const double dz = (stack(x1, y1) - stack(x2, y2)).norm();
    if (dz > 0.0) {
      const Vector g1 = stack(p.grad_x(x1, y1), p.grad_y(x1, y1));
      const Vector g2 = stack(p.grad_x(x2, y2), p.grad_y(x2, y2));
      est.ell_hat = std::max(est.ell_hat, (g1 - g2).norm() / dz);
      const Matrix H1 = full_hessian(p.hessian(x1, y1));
      const Matrix H2 = full_hessian(p.hessian(x2, y2));
      est.rho_hat = std::max(est.rho_hat, spectral_norm(H1 - H2) / dz);
    }

    const double dx = (x1 - x2).norm();
    if (dx > 0.0) {
      const auto e1 = eval_primal(p, x1, inner_tol);
      const auto e2 = eval_primal(p, x2, inner_tol);
      const Vector gp1 = p.grad_x(x1, e1.y);
      const Vector gp2 = p.grad_x(x2, e2.y);
      est.P_grad_lip_hat = std::max(est.P_grad_lip_hat, (gp1 - gp2).norm() / dx);
      const Matrix S1 = schur_complement(p.hessian(x1, e1.y));
      const Matrix S2 = schur_complement(p.hessian(x2, e2.y));
      est.P_hess_lip_hat = std::max(est.P_hess_lip_hat, spectral_norm(S1 - S2) / dx);
    }

    const double dy = (y1 - y2).norm();
    if (dy > 0.0) {
      const Matrix S1 = schur_complement(p.hessian(x1, y1));
      const Matrix S2 = schur_complement(p.hessian(x1, y2));
      est.schur_y_lip_hat = std::max(est.schur_y_lip_hat, spectral_norm(S1 - S2) / dy);
    }
  }
  return est;
}

}  // namespace minimax_cubic
