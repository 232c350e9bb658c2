#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include <minimax_cubic/chebyshev.hpp>
#include <minimax_cubic/verify.hpp>

#include "generators.hpp"

namespace mc = minimax_cubic;
using mc::Matrix;
using mc::Vector;

TEST(ChebErrorBound, DegenerateIsZero) { EXPECT_EQ(mc::cheb_error_bound(0.4, 0.4, 3), 0.0); }

TEST(ChebErrorBound, PluggedIn) {
  EXPECT_NEAR(mc::cheb_error_bound(0.5, 0.25, 0), (std::sqrt(2.0) - 1.0) / std::sqrt(0.125), 1e-15);
  // mpmath: 1.171572875253809902...
  EXPECT_NEAR(mc::cheb_error_bound(0.5, 0.25, 0), 1.1715728752538099, 1e-15);
}

TEST(ChebErrorBound, StrictlyDecreasing) {
  double prev = INFINITY;
  for (int k = 0; k < 60; ++k) {
    const double b = mc::cheb_error_bound(0.9, 0.05, k);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(ChebCoefficients, PositiveAndGeometric) {
  const auto c = mc::cheb_coefficients(0.5, 0.1, 8);
  for (size_t k = 1; k < c.size(); ++k) {
    EXPECT_GT(c[k], 0.0);
    EXPECT_LT(c[k], c[k - 1]);
    EXPECT_NEAR(c[k] / c[k - 1], c[1] / c[0], 1e-14);
  }
}

TEST(ChebDenseInverse, BoundHoldsAndChebyshevNormsAtMostOne) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(gen() % 8);
    const double lp = mc::testing::uniform(0.2, 0.99, gen);
    const double mp = lp * mc::testing::uniform(0.02, 1.0, gen);
    const Matrix X = mc::testing::random_symmetric(d, mp, lp, gen);
    const Matrix Xinv = X.inverse();
    for (int K = 0; K <= 30; K += 3) {
      const Matrix approx = mc::cheb_dense_inverse(X, lp, mp, K);
      EXPECT_LE(mc::spectral_norm(Xinv - approx), mc::cheb_error_bound(lp, mp, K) + 1e-10);
    }
    const Matrix Z = 2.0 / (lp - mp) * (0.5 * (lp + mp) * Matrix::Identity(d, d) - X);
    Matrix t0 = Matrix::Identity(d, d);
    Matrix t1 = Z;
    for (int k = 2; k < 30; ++k) {
      Matrix t2 = 2.0 * Z * t1 - t0;
      EXPECT_LE(mc::spectral_norm(t2), 1.0 + 1e-9);
      t0 = t1;
      t1 = t2;
    }
  }
}

namespace {

mc::ProblemInstance coupled_saddle(int dx, int dy, std::mt19937_64& gen, double mu = 0.7) {
  mc::SaddleSpec s;
  s.dim_x = dx;
  s.dim_y = dy;
  s.mu = mu;
  s.box_radius = 1.5;
  s.coupling = mc::testing::random_vector(dx * dy, 0.4, gen).reshaped(dx, dy);
  return mc::make_saddle_problem(s);
}

mc::ProblemInstance quadratic_with_yy(const Matrix& C, double ell, double coupling = 0.1) {
  const int dy = static_cast<int>(C.rows());
  mc::QuadraticSpec q;
  q.A = Matrix::Identity(2, 2);
  q.B = Matrix::Ones(2, dy) * coupling;
  q.C = C;
  q.a = Vector::Zero(2);
  q.b = Vector::Zero(dy);
  q.ell = ell;
  return mc::make_quadratic_problem(q);
}

}  // namespace

TEST(ApproxInverse, ZeroInput) {
  std::mt19937_64 gen(1);
  const auto inst = coupled_saddle(2, 3, gen);
  const Vector z = mc::approx_neg_yy_inverse_apply(inst.problem, Vector::Ones(2), Vector::Ones(3), 5, Vector::Zero(3));
  EXPECT_EQ(z.norm(), 0.0);
}

TEST(ApproxInverse, ScalarCurvatureConverges) {
  // -Hyy = c I with mu < c < ell: output tends to u / c within the bound.
  const double c = 1.7;
  // mu is declared below the true curvature so the interval is non-trivial.
  mc::QuadraticSpec q;
  q.A = Matrix::Identity(2, 2);
  q.B = Matrix::Ones(2, 3) * 0.1;
  q.C = c * Matrix::Identity(3, 3);
  q.a = Vector::Zero(2);
  q.b = Vector::Zero(3);
  q.ell = 4.0;
  q.mu = 0.5;
  const auto loose = mc::make_quadratic_problem(q);
  const Vector u = (Vector(3) << 1.0, -2.0, 0.5).finished();
  const auto x = Vector::Zero(2);
  const auto y = Vector::Zero(3);
  double prev_err = INFINITY;
  for (int K : {0, 2, 5, 10, 20, 40}) {
    const Vector z = mc::approx_neg_yy_inverse_apply(loose.problem, x, y, K, u);
    const double err = (z - u / c).norm();
    EXPECT_LE(err, mc::make_chebyshev_plan(4.0, 0.5, K).inverse_error_bound() * u.norm() + 1e-13);
    EXPECT_LE(err, prev_err + 1e-15);
    prev_err = err;
  }
  EXPECT_LT(prev_err, 1e-6);
}

TEST(ApproxInverse, DegenerateEllEqualsMuUsesNoOracle) {
  const auto inst = quadratic_with_yy(2.0 * Matrix::Identity(2, 2), 2.0, 0.0);
  ASSERT_EQ(inst.problem.ell(), inst.problem.mu());
  const auto p = inst.problem.with_fresh_counters();
  const Vector u = (Vector(2) << 3.0, 1.0).finished();
  const Vector z = mc::approx_neg_yy_inverse_apply(p, Vector::Zero(2), Vector::Zero(2), 7, u);
  EXPECT_LT((z - u / 2.0).norm(), 1e-15);
  EXPECT_EQ(p.counters().n_hvp, 0);
}

TEST(ApproxInverse, RecurrenceMatchesDensePolynomial) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int dy = 1 + static_cast<int>(gen() % 10);
    const auto inst = coupled_saddle(2, dy, gen);
    const auto& p = inst.problem;
    const Vector x = mc::testing::random_vector(2, 0.5, gen);
    const Vector y = mc::testing::random_vector(dy, 0.5, gen);
    const Vector u = mc::testing::random_vector(dy, 1.0, gen);
    const int K = static_cast<int>(gen() % 25);
    const auto plan = mc::make_chebyshev_plan(p.ell(), p.mu(), K);
    const Matrix X = -p.hessian(x, y).yy / (2.0 * p.ell());
    const Vector dense = mc::cheb_dense_inverse(X, plan.ell_scaled(), plan.mu_scaled(), K) * u / (2.0 * p.ell());
    const Vector rec = mc::approx_neg_yy_inverse_apply(p, x, y, K, u);
    EXPECT_LE((dense - rec).norm(), 1e-10 * (1.0 + dense.norm()));
  }
}

// The scaled form used for the primal Hessian and the unscaled series for an
// SPD matrix coincide: (c0/(4 ell)) I + (1/(2 ell)) sum c_k T_k(Z) equals the
// unscaled approximation of X^{-1} divided by 2 ell, with X = -Hyy/(2 ell).
TEST(ApproxInverse, ScaledAndUnscaledFormsAgree) {
  std::mt19937_64 gen(3);
  const double ell = 3.0;
  const double mu = 0.4;
  const Matrix negyy = mc::testing::random_symmetric(5, mu, ell, gen);
  const int K = 9;
  const auto plan = mc::make_chebyshev_plan(ell, mu, K);
  const Matrix Z = 4.0 * ell / (ell - mu) * ((ell + mu) / (4.0 * ell) * Matrix::Identity(5, 5) - negyy / (2.0 * ell));
  Matrix scaled = plan.coeffs[0] / (4.0 * ell) * Matrix::Identity(5, 5);
  Matrix t0 = Matrix::Identity(5, 5);
  Matrix t1 = Z;
  for (int k = 1; k <= K; ++k) {
    scaled += plan.coeffs[static_cast<size_t>(k)] / (2.0 * ell) * t1;
    Matrix t2 = 2.0 * Z * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  const Matrix unscaled = mc::cheb_dense_inverse(negyy / (2.0 * ell), 0.5, mu / (2.0 * ell), K) / (2.0 * ell);
  EXPECT_LT((scaled - unscaled).norm(), 1e-12);
  EXPECT_LE(mc::spectral_norm(negyy.inverse() - scaled), plan.inverse_error_bound() + 1e-12);
}

TEST(HvpPrimal, ZeroInput) {
  std::mt19937_64 gen(4);
  const auto inst = coupled_saddle(3, 2, gen);
  EXPECT_EQ(mc::hvp_primal(inst.problem, Vector::Ones(3), Vector::Ones(2), 4, Vector::Zero(3)).norm(), 0.0);
}

TEST(HvpPrimal, ConvergesToPrimalHessianOnQuadratic) {
  std::mt19937_64 gen(5);
  const auto inst = mc::make_quadratic_problem(mc::testing::random_quadratic(4, 3, gen, false));
  const Vector x = mc::testing::random_vector(4, 1.0, gen);
  const Vector y = mc::testing::random_vector(3, 1.0, gen);
  const Vector u = mc::testing::random_vector(4, 1.0, gen);
  const Vector h = mc::hvp_primal(inst.problem, x, y, 200, u);
  EXPECT_LT((h - inst.closed.primal_hessian(x) * u).norm(), 1e-8);
}

TEST(HvpPrimal, DegreeZeroTruncation) {
  std::mt19937_64 gen(6);
  const auto inst = coupled_saddle(3, 2, gen);
  const auto& p = inst.problem;
  const Vector x = mc::testing::random_vector(3, 0.5, gen);
  const Vector y = mc::testing::random_vector(2, 0.5, gen);
  const Vector u = mc::testing::random_vector(3, 1.0, gen);
  const auto h = p.hessian(x, y);
  const double c0 = mc::make_chebyshev_plan(p.ell(), p.mu(), 0).coeffs[0];
  const Vector expected = h.xx * u + c0 / (4.0 * p.ell()) * h.xy * h.xy.transpose() * u;
  EXPECT_LT((mc::hvp_primal(p, x, y, 0, u) - expected).norm(), 1e-13);
}

TEST(HvpPrimal, CountsKPlusThree) {
  std::mt19937_64 gen(7);
  const auto inst = coupled_saddle(3, 4, gen);
  for (int K : {0, 1, 2, 7, 30}) {
    const auto p = inst.problem.with_fresh_counters();
    mc::hvp_primal(p, Vector::Ones(3), Vector::Ones(4), K, Vector::Ones(3));
    EXPECT_EQ(p.counters().n_hvp, K + 3);
    EXPECT_EQ(p.counters().n_hess, 0);
  }
}

TEST(BuildDenseHt, ScalarCase) {
  std::mt19937_64 gen(8);
  const auto inst = coupled_saddle(1, 2, gen);
  const Vector x = Vector::Constant(1, 0.3);
  const Vector y = Vector::Constant(2, -0.2);
  const Matrix H = mc::build_dense_Ht(inst.problem, x, y, 6);
  EXPECT_EQ(H(0, 0), mc::hvp_primal(inst.problem, x, y, 6, Vector::Ones(1))(0));
}

TEST(BuildDenseHt, SymmetricAndMatchesReference) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = coupled_saddle(4, 1 + static_cast<int>(gen() % 8), gen);
    const auto& p = inst.problem;
    const Vector x = mc::testing::random_vector(4, 0.5, gen);
    const Vector y = mc::testing::random_vector(p.dim_y(), 0.5, gen);
    const int K = static_cast<int>(gen() % 15);
    const Matrix H = mc::build_dense_Ht(p, x, y, K);
    EXPECT_LE((H - H.transpose()).norm(), 1e-9 * H.norm());
    EXPECT_LE((H - mc::dense_Ht_reference(p.hessian(x, y), p.ell(), p.mu(), K)).norm(), 1e-10 * (1.0 + H.norm()));
  }
}

TEST(BuildDenseHt, ApproachesSchurComplement) {
  std::mt19937_64 gen(10);
  const auto inst = mc::make_quadratic_problem(mc::testing::random_quadratic(3, 4, gen, true));
  const Vector x = Vector::Zero(3);
  const Vector y = Vector::Zero(4);
  const Matrix H = mc::build_dense_Ht(inst.problem, x, y, 150);
  EXPECT_LT((H - inst.closed.primal_hessian(x)).norm(), 1e-9);
}
