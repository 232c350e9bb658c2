#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minimax_cubic/problem.hpp"

namespace minimax_cubic {

enum class Algorithm { mcn, imcn };
enum class StopReason { break_smallstep, break_delta, iteration_cap };

std::string to_string(Algorithm a);
std::string to_string(StopReason r);
Algorithm parse_algorithm(const std::string& name);

inline constexpr std::int64_t kDefaultTMax = 10'000;

struct SolverConfig {
  double eps = 1e-3;
  double delta = 0.1;                 // failure probability, IMCN only
  std::optional<double> C_g;          // default 1/192 (MCN), 1/240 (IMCN)
  std::optional<double> C_H;          // default 1/48 (MCN), 1/200 (IMCN)
  double C_sigma = 0.25;
  std::optional<std::int64_t> T_max;  // caps T; T = T_max when P* is unknown
  std::uint64_t rng_seed = 0;
  std::optional<double> y0_radius_estimate;  // bound on |y0 - y*(x0)| for K_0
  std::optional<double> P_star;       // overrides the problem's known minimum
  std::optional<int> Kp;              // Chebyshev degree override (IMCN)
  std::optional<std::int64_t> gd_budget;  // perturbed-solver budget override (IMCN)
  bool log_primal = true;             // record P(x_t) in the trace
};

double default_C_g(Algorithm a);
double default_C_H(Algorithm a);

/// One outer iteration. Fields that do not apply to the running algorithm are
/// left empty.
struct IterationRecord {
  std::int64_t t = 0;
  std::int64_t K_t = 0;
  double s_norm = 0.0;
  std::optional<double> delta;        // IMCN model value of the candidate step
  double model_value = 0.0;           // m(s_t)
  double model_decrease = 0.0;        // -m(s_t)
  double g_norm = 0.0;
  std::optional<double> P;            // P(x_t)
  bool P_approximate = false;
  std::string branch;                 // exact | cauchy | gd
  std::int64_t inner_steps = 0;       // perturbed-solver steps
  CounterSnapshot counters;           // cumulative after this iteration
};

using TraceSink = std::function<void(const IterationRecord&)>;

struct RunTrace {
  Algorithm algorithm = Algorithm::mcn;
  std::vector<IterationRecord> records;
  StopReason reason = StopReason::iteration_cap;
  Vector x_hat;
  Vector y_last;
  std::int64_t iterations = 0;        // number of outer iterations executed
  std::int64_t T = 0;                 // cap in force
  bool T_from_theorem = false;
  double eps_tilde = 0.0;
  double eps_break = 0.0;             // eps' for MCN, eps for IMCN
  int Kp = 0;                         // IMCN only
  std::int64_t gd_budget = 0;         // IMCN only
  double sigma = 0.0;                 // IMCN only
  std::optional<double> P0;
  std::optional<double> P_star;
  CounterSnapshot counters;
};

struct RunOptions {
  const ClosedForms* closed = nullptr;  // enables exact P logging and P*
  TraceSink sink;                       // called once per outer iteration
};

/// Inner-accuracy targets.
double mcn_eps_tilde(const SmoothnessConstants& c, double eps_prime, double C_g, double C_H);
double imcn_eps_tilde(const SmoothnessConstants& c, double eps, double C_g, double C_H);

/// Chebyshev degree for IMCN.
int imcn_Kp(const SmoothnessConstants& c, double eps, double C_H);

/// AGD steps for outer iteration t.
std::int64_t schedule_Kt(std::int64_t t, double kappa, double teps, double s_prev_norm,
                         double y0_norm_bound);

/// Outer-iteration caps implied by a known P*.
std::int64_t mcn_T_bound(double P0_minus_Pstar, double M, double eps_prime);
std::int64_t imcn_T_bound(double P0_minus_Pstar, double M, double eps);

/// 2^{-2.5} eps.
double mcn_eps_prime(double eps);

RunTrace mcn_run(const MinimaxProblem& p, const Vector& x0, const SolverConfig& cfg,
                 const RunOptions& opts = {});
RunTrace imcn_run(const MinimaxProblem& p, const Vector& x0, const SolverConfig& cfg,
                  const RunOptions& opts = {});
RunTrace run_solver(Algorithm a, const MinimaxProblem& p, const Vector& x0,
                    const SolverConfig& cfg, const RunOptions& opts = {});

struct RefineResult {
  Vector x_hat;
  Vector y_hat;
  std::int64_t K_hat = 0;
  double grad_norm = 0.0;       // |grad f(x_hat, y_hat)| over both blocks
  double schur_min_eig = 0.0;
  bool grad_pass = false;       // grad_norm <= alpha
  bool curvature_pass = false;  // schur_min_eig >= -beta
  bool eps_compatible = false;  // cfg.eps <= min{alpha/3, beta^2/(8 kappa^3 rho)}
};

/// Extra AGD pass on y at x_hat followed by the two measurable local-minimax
/// conditions.
RefineResult refine_local_minimax(const MinimaxProblem& p, const Vector& x_hat,
                                  const Vector& y_last, double alpha, double beta,
                                  const SolverConfig& cfg);

}  // namespace minimax_cubic
