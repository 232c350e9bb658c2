#include "minimax_cubic/chebyshev.hpp"

#include <cmath>

namespace minimax_cubic {

namespace {

void check_scaled(double ell_p, double mu_p, int Kp) {
  if (!(mu_p > 0.0) || !(mu_p <= ell_p)) throw std::invalid_argument("chebyshev: need 0 < mu' <= ell'");
  if (Kp < 0) throw std::invalid_argument("chebyshev: degree must be non-negative");
}

}  // namespace

std::vector<double> cheb_coefficients(double ell_p, double mu_p, int Kp) {
  check_scaled(ell_p, mu_p, Kp);
  const double r = std::sqrt(ell_p / mu_p);
  const double q = (r - 1.0) / (r + 1.0);
  std::vector<double> c(static_cast<size_t>(Kp) + 1);
  double qk = 1.0;
  for (int k = 0; k <= Kp; ++k) {
    c[static_cast<size_t>(k)] = 2.0 / std::sqrt(ell_p * mu_p) * qk;
    qk *= q;
  }
  return c;
}

double cheb_error_bound(double ell_p, double mu_p, int Kp) {
  check_scaled(ell_p, mu_p, Kp);
  if (ell_p == mu_p) return 0.0;
  const double r = std::sqrt(ell_p / mu_p);
  return (r - 1.0) / std::sqrt(ell_p * mu_p) * std::pow(1.0 - 2.0 / (r + 1.0), Kp);
}

Matrix cheb_dense_inverse(const Matrix& X, double ell_p, double mu_p, int Kp) {
  check_scaled(ell_p, mu_p, Kp);
  if (X.rows() != X.cols()) throw std::invalid_argument("chebyshev: X must be square");
  const auto d = X.rows();
  const Matrix I = Matrix::Identity(d, d);
  if (ell_p == mu_p) return I / ell_p;
  const auto c = cheb_coefficients(ell_p, mu_p, Kp);
  const Matrix Z = 2.0 / (ell_p - mu_p) * (0.5 * (ell_p + mu_p) * I - X);
  Matrix out = 0.5 * c[0] * I;
  Matrix t_prev = I;
  Matrix t_cur = Z;
  for (int k = 1; k <= Kp; ++k) {
    out += c[static_cast<size_t>(k)] * t_cur;
    Matrix t_next = 2.0 * Z * t_cur - t_prev;
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  return out;
}

double ChebyshevPlan::inverse_error_bound() const {
  return cheb_error_bound(ell_scaled(), mu_scaled(), Kp) / (2.0 * ell);
}

ChebyshevPlan make_chebyshev_plan(double ell, double mu, int Kp) {
  if (!(mu > 0.0) || !(mu <= ell)) throw std::invalid_argument("chebyshev: need 0 < mu <= ell");
  if (Kp < 0) throw std::invalid_argument("chebyshev: degree must be non-negative");
  ChebyshevPlan plan;
  plan.ell = ell;
  plan.mu = mu;
  plan.Kp = Kp;
  if (ell != mu) plan.coeffs = cheb_coefficients(plan.ell_scaled(), plan.mu_scaled(), Kp);
  return plan;
}

Vector approx_neg_yy_inverse_apply(const MinimaxProblem& p, const Vector& x, const Vector& y,
                                   int Kp, const Vector& u) {
  if (u.size() != p.dim_y()) throw std::invalid_argument("chebyshev: u must have length d_y");
  const double ell = p.ell();
  const double mu = p.mu();
  const ChebyshevPlan plan = make_chebyshev_plan(ell, mu, Kp);
  // -Hyy = ell I exactly, so the inverse needs no oracle call.
  if (ell == mu) return u / ell;

  const auto& c = plan.coeffs;
  // Z v = (2/(ell - mu)) Hyy v + ((ell + mu)/(ell - mu)) v
  const double a = 2.0 / (ell - mu);
  const double b = (ell + mu) / (ell - mu);
  Vector acc = 0.5 * c[0] * u;
  Vector v_prev = u;
  Vector v_cur;
  for (int k = 1; k <= Kp; ++k) {
    const Vector hv = p.hvp_yy(x, y, k == 1 ? v_prev : v_cur);
    if (k == 1) {
      v_cur = a * hv + b * v_prev;
    } else {
      Vector v_next = 2.0 * a * hv + 2.0 * b * v_cur - v_prev;
      v_prev = std::move(v_cur);
      v_cur = std::move(v_next);
    }
    acc += c[static_cast<size_t>(k)] * v_cur;
  }
  return acc / (2.0 * ell);
}

Vector hvp_primal(const MinimaxProblem& p, const Vector& x, const Vector& y, int Kp,
                  const Vector& u_prime) {
  if (u_prime.size() != p.dim_x()) throw std::invalid_argument("hvp_primal: u' must have length d_x");
  const Vector w = p.hvp_yx(x, y, u_prime);
  const Vector z = approx_neg_yy_inverse_apply(p, x, y, Kp, w);
  return p.hvp_xx(x, y, u_prime) + p.hvp_xy(x, y, z);
}

Matrix build_dense_Ht(const MinimaxProblem& p, const Vector& x, const Vector& y, int Kp) {
  const int d = p.dim_x();
  Matrix H(d, d);
  for (int i = 0; i < d; ++i) H.col(i) = hvp_primal(p, x, y, Kp, Vector::Unit(d, i));
  return H;
}

Matrix dense_Ht_reference(const HessianBlocks& h, double ell, double mu, int Kp) {
  const ChebyshevPlan plan = make_chebyshev_plan(ell, mu, Kp);
  const Matrix X = -h.yy / (2.0 * ell);
  const Matrix inv = cheb_dense_inverse(X, plan.ell_scaled(), plan.mu_scaled(), Kp) / (2.0 * ell);
  return h.xx + h.xy * inv * h.xy.transpose();
}

}  // namespace minimax_cubic
