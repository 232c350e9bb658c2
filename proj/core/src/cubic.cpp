#include "minimax_cubic/cubic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace minimax_cubic {

const Matrix& CubicModel::dense() const {
  if (const auto* h = std::get_if<Matrix>(&H)) return *h;
  throw std::invalid_argument("cubic model: a dense Hessian is required");
}

Vector CubicModel::apply(const Vector& v) const {
  if (const auto* h = std::get_if<Matrix>(&H)) return *h * v;
  const auto& op = std::get<LinearOperator>(H);
  if (!op) throw std::invalid_argument("cubic model: empty Hessian operator");
  Vector out = op(v);
  if (out.size() != v.size()) throw std::invalid_argument("cubic model: operator changed the dimension");
  return out;
}

namespace {

void check_model(const CubicModel& m) {
  if (!(m.M > 0.0)) throw std::invalid_argument("cubic model: M must be positive");
  if (m.g.size() == 0) throw std::invalid_argument("cubic model: empty linear term");
  if (const auto* h = std::get_if<Matrix>(&m.H)) {
    if (h->rows() != m.g.size() || h->cols() != m.g.size()) {
      throw std::invalid_argument("cubic model: H and g dimensions disagree");
    }
  }
}

double value_with(const CubicModel& m, const Vector& s, const Vector& Hs) {
  const double n = s.norm();
  return m.g.dot(s) + 0.5 * s.dot(Hs) + m.M / 6.0 * n * n * n;
}

double residual_with(const CubicModel& m, const Vector& s, const Vector& Hs) {
  return (m.g + Hs + 0.5 * m.M * s.norm() * s).norm();
}

void finish(const CubicModel& m, CubicSolution& out) {
  const Vector Hs = m.apply(out.s);
  out.model_value = value_with(m, out.s, Hs);
  out.residual = residual_with(m, out.s, Hs);
}

}  // namespace

double cubic_model_value(const CubicModel& m, const Vector& s) {
  check_model(m);
  if (s.size() != m.g.size()) throw std::invalid_argument("cubic model: step has the wrong length");
  return value_with(m, s, m.apply(s));
}

double cubic_residual(const CubicModel& m, const Vector& s) {
  check_model(m);
  if (s.size() != m.g.size()) throw std::invalid_argument("cubic model: step has the wrong length");
  return residual_with(m, s, m.apply(s));
}

CubicSolution solve_cubic_exact(const CubicModel& m, double tol) {
  check_model(m);
  if (!(tol > 0.0)) throw std::invalid_argument("solve_cubic_exact: tol must be positive");
  const Matrix& H0 = m.dense();
  const Matrix H = 0.5 * (H0 + H0.transpose());
  const auto d = H.rows();

  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) {
    throw NumericalError("solve_cubic_exact: eigendecomposition failed");
  }
  const Vector& evals = es.eigenvalues();
  const Matrix& Q = es.eigenvectors();
  const double lam1 = evals(0);
  const double h_norm = std::max(std::abs(evals(0)), std::abs(evals(d - 1)));
  const double g_norm = m.g.norm();
  const Vector gt = Q.transpose() * m.g;

  // Gaps to the bottom eigenvalue; the secular equation is solved in the
  // shift gamma = lam + lam1 so that denominators near the pole keep their
  // relative precision.
  Vector gap = (evals.array() - lam1).max(0.0).matrix();
  const double cluster_tol = 1e-12 * std::max(1.0, h_norm);
  std::vector<bool> bottom(static_cast<size_t>(d));
  double bottom_norm2 = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    bottom[static_cast<size_t>(i)] = gap(i) <= cluster_tol;
    if (bottom[static_cast<size_t>(i)]) bottom_norm2 += gt(i) * gt(i);
  }

  CubicSolution out;
  const double M = m.M;

  if (g_norm == 0.0 && lam1 >= 0.0) {
    out.s = Vector::Zero(d);
    out.lam = 0.0;
    finish(m, out);
    return out;
  }

  auto step_at = [&](double gamma, bool skip_bottom) {
    Vector st = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (gt(i) == 0.0 || (skip_bottom && bottom[static_cast<size_t>(i)])) continue;
      st(i) = -gt(i) / (gap(i) + gamma);
    }
    return st;
  };

  // Hard case: g has (numerically) no component in the bottom eigenspace and
  // the remaining step is too short to reach the boundary lam = -lam1.
  const bool g_off_bottom = g_norm == 0.0 || std::sqrt(bottom_norm2) < 1e-12 * g_norm;
  if (lam1 < 0.0 && g_off_bottom) {
    const Vector s_perp = step_at(0.0, true);
    const double radius = -2.0 * lam1 / M;
    if (s_perp.norm() <= radius) {
      const double tau = std::sqrt(std::max(0.0, radius * radius - s_perp.squaredNorm()));
      Vector v = Q.col(0);
      for (Eigen::Index j = 0; j < d; ++j) {
        if (std::abs(v(j)) > 1e-12) {
          if (v(j) < 0.0) v = -v;
          break;
        }
      }
      out.s = Q * s_perp + tau * v;
      out.lam = -lam1;
      out.hard_case = true;
      finish(m, out);
      return out;
    }
  }

  // psi(gamma) = |s(gamma)| - 2 (gamma - lam1) / M is convex and decreasing.
  auto psi = [&](double gamma, double& dpsi) {
    double n2 = 0.0;
    double d3 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (gt(i) == 0.0) continue;
      const double den = gap(i) + gamma;
      const double q = gt(i) / den;
      n2 += q * q;
      d3 += q * q / den;
    }
    const double n = std::sqrt(n2);
    dpsi = (n > 0.0 ? -d3 / n : 0.0) - 2.0 / M;
    return n - 2.0 * (gamma - lam1) / M;
  };

  double lo = std::max(0.0, lam1);
  double hi = 0.5 * (lam1 + std::sqrt(lam1 * lam1 + 2.0 * M * g_norm));
  hi = std::max(hi, lo);
  double gamma = hi;
  double dpsi = 0.0;
  double val = psi(gamma, dpsi);
  constexpr int kMaxIter = 300;
  int it = 0;
  for (; it < kMaxIter; ++it) {
    const double scale = std::abs(2.0 * (gamma - lam1) / M) + std::abs(val + 2.0 * (gamma - lam1) / M);
    if (std::abs(val) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
    if (val > 0.0) lo = gamma; else hi = gamma;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(hi, 1e-300)) break;
    double next = gamma - val / dpsi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    gamma = next;
    val = psi(gamma, dpsi);
  }
  if (it == kMaxIter || !std::isfinite(val)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "solve_cubic_exact: secular equation did not converge; bracket for lam = ["
        << lo - lam1 << ", " << hi - lam1 << "]";
    throw NumericalError(msg.str());
  }

  out.s = Q * step_at(gamma, false);
  out.lam = 0.5 * M * out.s.norm();
  if (!all_finite(out.s)) throw NumericalError("solve_cubic_exact: non-finite step");
  finish(m, out);
  return out;
}

CubicSolution cauchy_point(const CubicModel& m) {
  check_model(m);
  const double g_norm = m.g.norm();
  if (!(g_norm > 0.0)) throw std::invalid_argument("cauchy_point: gradient must be nonzero");
  const Vector Hg = m.apply(m.g);
  const double a = m.g.dot(Hg) / (m.M * g_norm * g_norm);
  const double c = 2.0 * g_norm / m.M;
  const double root = std::sqrt(a * a + c);
  const double R = a > 0.0 ? c / (a + root) : -a + root;

  CubicSolution out;
  out.s = -R * m.g / g_norm;
  out.model_value = -R * g_norm / 2.0 - m.M * R * R * R / 12.0;
  // Hs is a multiple of Hg along this ray, so no further product is needed.
  const Vector Hs = -R / g_norm * Hg;
  out.residual = residual_with(m, out.s, Hs);
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(seed ^ splitmix(stream));
}

Vector sphere_sample(int d, std::uint64_t seed) {
  if (d <= 0) throw std::invalid_argument("sphere_sample: dimension must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(d);
  double n = 0.0;
  while (!(n > 0.0)) {
    for (int i = 0; i < d; ++i) z(i) = normal(gen);
    n = z.norm();
  }
  return z / n;
}

CubicSolution cubic_solver_gd(const CubicModel& m, double L, double sigma, std::int64_t K_max,
                              std::uint64_t seed) {
  check_model(m);
  if (!(L > 0.0)) throw std::invalid_argument("cubic_solver_gd: L must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("cubic_solver_gd: sigma must be non-negative");
  if (K_max < 0) throw std::invalid_argument("cubic_solver_gd: K_max must be non-negative");
  const double eta = 1.0 / (20.0 * L);
  const Vector g_tilde = sigma > 0.0 ? Vector(m.g + sigma * sphere_sample(m.dim(), seed)) : m.g;

  CubicSolution out;
  out.s = Vector::Zero(m.dim());
  if (K_max == 0) {
    out.model_value = 0.0;
    out.residual = m.g.norm();
    return out;
  }
  Vector& s = out.s;
  constexpr double kStall = 4.0 * std::numeric_limits<double>::epsilon();
  for (std::int64_t k = 0; k < K_max; ++k) {
    const Vector step = eta * (g_tilde + m.apply(s) + 0.5 * m.M * s.norm() * s);
    s -= step;
    out.iterations = k + 1;
    if (!all_finite(s)) {
      std::ostringstream msg;
      msg << "cubic_solver_gd: non-finite iterate at step " << k + 1;
      throw NumericalError(msg.str());
    }
    if (step.norm() <= kStall * s.norm()) break;
  }
  finish(m, out);
  return out;
}

std::int64_t final_solver_cap(double L, double M, double eps, double g_norm) {
  if (!(L > 0.0) || !(M > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("final_solver_cap: L, M and eps must be positive");
  }
  const double cap = std::ceil(100.0 * L * L / (M * eps) * (1.0 + std::log1p(g_norm)));
  if (!(cap < 9.0e18)) throw std::overflow_error("final_solver_cap: cap does not fit in 64 bits");
  return static_cast<std::int64_t>(cap);
}

Vector final_cubic_solver(const CubicModel& m, double L, double eps, std::int64_t iter_cap) {
  check_model(m);
  if (!(L > 0.0) || !(eps > 0.0)) throw std::invalid_argument("final_cubic_solver: L and eps must be positive");
  const double eta = 1.0 / (20.0 * L);
  Vector s = Vector::Zero(m.dim());
  Vector gm = m.g;
  std::int64_t k = 0;
  while (gm.norm() >= eps / 2.0) {
    if (k >= iter_cap) {
      std::ostringstream msg;
      msg << "final_cubic_solver: model gradient " << gm.norm() << " still >= " << eps / 2.0
          << " after " << k << " steps";
      throw IterationCapError(msg.str());
    }
    s -= eta * gm;
    gm = m.g + m.apply(s) + 0.5 * m.M * s.norm() * s;
    if (!all_finite(gm)) throw NumericalError("final_cubic_solver: non-finite model gradient");
    ++k;
  }
  return s;
}

std::int64_t iteration_budget(double eps, double delta_p, double L, double M, double C_sigma,
                              double C_H, int d) {
  if (!(eps > 0.0) || !(L > 0.0) || !(M > 0.0) || !(C_H > 0.0) || d <= 0) {
    throw std::invalid_argument("iteration_budget: inputs must be positive");
  }
  if (!(delta_p > 0.0 && delta_p < 1.0)) throw std::invalid_argument("iteration_budget: delta' must lie in (0, 1)");
  if (!(C_sigma > 0.0 && C_sigma <= 1.0)) throw std::invalid_argument("iteration_budget: C_sigma must lie in (0, 1]");
  const double r = std::sqrt(M * eps);
  const double lead = 19200.0 * L / (C_sigma * r);
  const double t1 = 6.0 * std::log(3.0 + 9.0 * std::sqrt(static_cast<double>(d)) / delta_p);
  const double t2 = 18.0 * std::log(6.0 * L / r);
  const double t3 = 14.0 * std::log(48.0 * (L + C_H * r) / (C_sigma * r) + 24.0 / C_sigma);
  const double K = std::ceil(lead * (t1 + t2 + t3));
  if (!(K < 9.0e18)) throw std::overflow_error("iteration_budget: budget does not fit in 64 bits");
  return static_cast<std::int64_t>(std::max(0.0, K));
}

double sigma_value(double eps, double L, double M, double C_sigma) {
  if (!(eps > 0.0) || !(L > 0.0) || !(M > 0.0) || !(C_sigma > 0.0)) {
    throw std::invalid_argument("sigma_value: inputs must be positive");
  }
  return C_sigma * M * M * std::sqrt(eps * eps * eps / (M * M * M)) /
         (4608.0 * (4.0 * L + std::sqrt(M * eps)));
}

}  // namespace minimax_cubic
