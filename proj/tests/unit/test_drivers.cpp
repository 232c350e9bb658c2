#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <minimax_cubic/drivers.hpp>
#include <minimax_cubic/verify.hpp>

#include "generators.hpp"

namespace mc = minimax_cubic;
using mc::Vector;

namespace {

mc::SaddleSpec small_saddle() {
  mc::SaddleSpec s;
  s.mu = 24.0;
  return s;
}

mc::QuadraticSpec fixed_quadratic() {
  std::mt19937_64 gen(21);
  return mc::testing::random_quadratic(3, 2, gen, true);
}

}  // namespace

TEST(ScheduleKt, KappaOneNeedsOneStep) {
  EXPECT_EQ(mc::schedule_Kt(1, 1.0, 1e-3, 0.0, 0.0), 1);
}

TEST(ScheduleKt, ZeroWhenStartWithinTarget) {
  const double teps = 1e-3;
  EXPECT_EQ(mc::schedule_Kt(0, 1.0, teps, 0.0, teps / std::sqrt(2.0)), 0);
  EXPECT_EQ(mc::schedule_Kt(0, 4.0, teps, 0.0, 0.0), 0);
}

TEST(ScheduleKt, MonotoneInStepAndKappa) {
  std::int64_t prev = 0;
  for (double s = 1e-6; s < 1e2; s *= 3.0) {
    const auto k = mc::schedule_Kt(3, 5.0, 1e-4, s, 0.0);
    EXPECT_GE(k, prev);
    prev = k;
  }
  EXPECT_LE(mc::schedule_Kt(2, 2.0, 1e-4, 0.1, 0.0), mc::schedule_Kt(2, 8.0, 1e-4, 0.1, 0.0));
}

TEST(ScheduleKt, RejectsBadArguments) {
  EXPECT_THROW(mc::schedule_Kt(1, 0.5, 1e-3, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(mc::schedule_Kt(1, 2.0, 0.0, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(mc::schedule_Kt(-1, 2.0, 1e-3, 0.1, 0.0), std::invalid_argument);
}

TEST(Bounds, TCapsFromGap) {
  const double M = 4.0 * std::sqrt(2.0);
  const double ep = mc::mcn_eps_prime(1e-2);
  EXPECT_EQ(mc::mcn_T_bound(0.0, M, ep), 1);
  EXPECT_EQ(mc::mcn_T_bound(1.0, M, ep), static_cast<std::int64_t>(std::ceil(192.0 * std::sqrt(M) * std::pow(ep, -1.5))) + 1);
  EXPECT_EQ(mc::imcn_T_bound(1.0, M, 1e-2), static_cast<std::int64_t>(std::ceil(626.0 * std::sqrt(M) * 1e3)));
  EXPECT_DOUBLE_EQ(mc::mcn_eps_prime(1.0), std::pow(2.0, -2.5));
}

TEST(Mcn, QuadraticReachesSecondOrderPoint) {
  const auto inst = mc::make_quadratic_problem(fixed_quadratic());
  mc::SolverConfig cfg;
  cfg.eps = 1e-3;
  const auto tr = mc::mcn_run(inst.problem, Vector::Constant(3, 1.5), cfg, {&inst.closed, {}});
  EXPECT_EQ(tr.reason, mc::StopReason::break_smallstep);
  EXPECT_TRUE(tr.T_from_theorem);
  EXPECT_LE(tr.iterations, tr.T);
  const auto rep = mc::check_stationarity(inst.problem, tr.x_hat, cfg.eps, std::sqrt(inst.problem.derived().M * cfg.eps), 1e-10);
  EXPECT_TRUE(rep.ssp_pass);
  EXPECT_LE((tr.x_hat - *inst.closed.minimizer).norm(), 1e-2);
}

TEST(Mcn, CountersMatchTheLoop) {
  const auto inst = mc::make_quadratic_problem(fixed_quadratic());
  mc::SolverConfig cfg;
  cfg.eps = 1e-3;
  const auto before = inst.problem.counters();
  const auto tr = mc::mcn_run(inst.problem, Vector::Constant(3, 1.5), cfg, {&inst.closed, {}});
  EXPECT_EQ(inst.problem.counters(), before);
  EXPECT_EQ(tr.counters.n_hess, tr.iterations);
  EXPECT_EQ(tr.counters.n_hvp, 0);
  std::int64_t agd = 0;
  for (const auto& r : tr.records) agd += r.K_t;
  EXPECT_EQ(tr.counters.n_grad, agd + tr.iterations + 1);
  ASSERT_EQ(static_cast<std::int64_t>(tr.records.size()), tr.iterations);
  EXPECT_EQ(tr.records.back().counters, tr.counters);
}

TEST(Mcn, PrimalDecreasesOnEveryIteration) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  mc::SolverConfig cfg;
  cfg.eps = 1e-3;
  const auto tr = mc::mcn_run(inst.problem, Vector::Constant(1, 0.05), cfg, {&inst.closed, {}});
  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    EXPECT_LE(*tr.records[i].P, *tr.records[i - 1].P + 1e-12);
  }
  EXPECT_NEAR(std::abs(tr.x_hat(0)), 1.0, 1e-2);
}

TEST(Mcn, IterationCapReturnsLastIterate) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  mc::SolverConfig cfg;
  cfg.eps = 1e-6;
  cfg.T_max = 2;
  const auto tr = mc::mcn_run(inst.problem, Vector::Constant(1, 0.05), cfg, {&inst.closed, {}});
  EXPECT_EQ(tr.reason, mc::StopReason::iteration_cap);
  EXPECT_EQ(tr.iterations, 2);
  EXPECT_EQ(tr.records.size(), 2u);
}

TEST(Mcn, UnknownMinimumUsesDefaultCap) {
  const auto inst = mc::make_quadratic_problem(fixed_quadratic());
  mc::SolverConfig cfg;
  cfg.log_primal = false;
  const auto tr = mc::mcn_run(inst.problem, Vector::Zero(3), cfg);
  EXPECT_FALSE(tr.T_from_theorem);
  EXPECT_EQ(tr.T, mc::kDefaultTMax);
  EXPECT_FALSE(tr.records.front().P.has_value());
}

TEST(Mcn, ApproximatePrimalIsFlagged) {
  const auto inst = mc::make_quadratic_problem(fixed_quadratic());
  mc::SolverConfig cfg;
  const auto tr = mc::mcn_run(inst.problem, Vector::Zero(3), cfg);
  ASSERT_TRUE(tr.records.front().P.has_value());
  EXPECT_TRUE(tr.records.front().P_approximate);
  EXPECT_NEAR(*tr.records.front().P, inst.closed.primal(Vector::Zero(3)), 1e-8);
}

TEST(Mcn, RejectsBadInputs) {
  const auto inst = mc::make_quadratic_problem(fixed_quadratic());
  mc::SolverConfig cfg;
  EXPECT_THROW(mc::mcn_run(inst.problem, Vector::Zero(2), cfg), std::invalid_argument);
  cfg.eps = -1.0;
  EXPECT_THROW(mc::mcn_run(inst.problem, Vector::Zero(3), cfg), std::invalid_argument);
}

TEST(Imcn, SaddleEscapesAndTerminates) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  mc::SolverConfig cfg;
  cfg.eps = 1e-3;
  cfg.rng_seed = 1;
  const auto tr = mc::imcn_run(inst.problem, Vector::Zero(1), cfg, {&inst.closed, {}});
  EXPECT_EQ(tr.reason, mc::StopReason::break_delta);
  EXPECT_EQ(tr.counters.n_hess, 0);
  EXPECT_GT(tr.counters.n_hvp, 0);
  EXPECT_EQ(tr.Kp, 10);
  EXPECT_GT(mc::min_eigenvalue(inst.closed.primal_hessian(tr.x_hat)), 0.0);
  for (const auto& r : tr.records) EXPECT_TRUE(r.branch == "gd" || r.branch == "cauchy");
}

TEST(Imcn, SameSeedSameTrace) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  mc::SolverConfig cfg;
  cfg.eps = 1e-2;
  cfg.rng_seed = 5;
  const auto a = mc::imcn_run(inst.problem, Vector::Zero(1), cfg, {&inst.closed, {}});
  const auto b = mc::imcn_run(inst.problem, Vector::Zero(1), cfg, {&inst.closed, {}});
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].s_norm, b.records[i].s_norm);
    EXPECT_EQ(a.records[i].counters, b.records[i].counters);
  }
  EXPECT_EQ(a.x_hat, b.x_hat);
}

TEST(Imcn, RejectsVacuousAccuracy) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  const auto d = inst.problem.derived();
  mc::SolverConfig cfg;
  cfg.eps = 2.0 * d.L * d.L / d.M;
  EXPECT_THROW(mc::imcn_run(inst.problem, Vector::Zero(1), cfg), std::invalid_argument);
  cfg.eps = 1e-3;
  cfg.delta = 1.0;
  EXPECT_THROW(mc::imcn_run(inst.problem, Vector::Zero(1), cfg), std::invalid_argument);
}

TEST(Imcn, SinkSeesEveryRecord) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  mc::SolverConfig cfg;
  cfg.eps = 1e-2;
  std::vector<std::int64_t> seen;
  const auto tr = mc::imcn_run(inst.problem, Vector::Zero(1), cfg,
                               {&inst.closed, [&](const mc::IterationRecord& r) { seen.push_back(r.t); }});
  ASSERT_EQ(seen.size(), tr.records.size());
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], static_cast<std::int64_t>(i));
}

TEST(EpsTilde, DefaultsMatchFormula) {
  mc::SmoothnessConstants c{2.0, 1.0, 1.0};
  const auto d = mc::derive_constants(c);
  const double ep = mc::mcn_eps_prime(1e-2);
  EXPECT_DOUBLE_EQ(mc::mcn_eps_tilde(c, ep, 1.0 / 192, 1.0 / 48),
                   std::min(ep / 192 / 2.0, std::sqrt(d.M * ep) / 48));
  const double hess = std::min(std::sqrt(d.M * 1e-2) / 200, 0.12 * d.L);
  EXPECT_DOUBLE_EQ(mc::imcn_eps_tilde(c, 1e-2, 1.0 / 240, 1.0 / 200),
                   std::min(1e-2 / 240 / 2.0, hess / (6.0 * 4.0)));
}

TEST(Refine, LocalMinimaxAtWellBottom) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  mc::SolverConfig cfg;
  cfg.eps = 1e-6;
  const auto r = mc::refine_local_minimax(inst.problem, Vector::Ones(1), Vector::Constant(1, 1e-5), 1e-3, 1.0, cfg);
  EXPECT_TRUE(r.grad_pass);
  EXPECT_TRUE(r.curvature_pass);
  EXPECT_TRUE(r.eps_compatible);
  EXPECT_GT(r.K_hat, 0);
  EXPECT_NEAR(r.schur_min_eig, 2.0, 1e-12);
}

TEST(Refine, SaddleFailsCurvature) {
  const auto inst = mc::make_saddle_problem(small_saddle());
  mc::SolverConfig cfg;
  cfg.eps = 1e-6;
  const auto r = mc::refine_local_minimax(inst.problem, Vector::Zero(1), Vector::Zero(1), 1e-3, 0.5, cfg);
  EXPECT_TRUE(r.grad_pass);
  EXPECT_FALSE(r.curvature_pass);
}
