#include "minimax_cubic/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minimax_cubic/agd.hpp"
#include "minimax_cubic/chebyshev.hpp"
#include "minimax_cubic/cubic.hpp"
#include "minimax_cubic/verify.hpp"

namespace minimax_cubic {

std::string to_string(Algorithm a) { return a == Algorithm::mcn ? "mcn" : "imcn"; }

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::break_smallstep: return "break-smallstep";
    case StopReason::break_delta: return "break-delta";
    case StopReason::iteration_cap: return "iteration-cap";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mcn") return Algorithm::mcn;
  if (name == "imcn") return Algorithm::imcn;
  throw std::invalid_argument("unknown algorithm '" + name + "' (expected mcn or imcn)");
}

double default_C_g(Algorithm a) { return a == Algorithm::mcn ? 1.0 / 192.0 : 1.0 / 240.0; }
double default_C_H(Algorithm a) { return a == Algorithm::mcn ? 1.0 / 48.0 : 1.0 / 200.0; }

double mcn_eps_prime(double eps) { return std::pow(2.0, -2.5) * eps; }

double mcn_eps_tilde(const SmoothnessConstants& c, double eps_prime, double C_g, double C_H) {
  const auto d = derive_constants(c);
  return std::min(C_g * eps_prime / c.ell, C_H * std::sqrt(d.M * eps_prime) / c.rho);
}

double imcn_eps_tilde(const SmoothnessConstants& c, double eps, double C_g, double C_H) {
  const auto d = derive_constants(c);
  const double hess_acc = std::min(C_H * std::sqrt(d.M * eps), 3.0 / 25.0 * d.L);
  return std::min(C_g * eps / c.ell, hess_acc / (6.0 * c.rho * d.kappa * d.kappa));
}

int imcn_Kp(const SmoothnessConstants& c, double eps, double C_H) {
  const auto d = derive_constants(c);
  const double hess_acc = std::min(C_H * std::sqrt(d.M * eps), 3.0 / 25.0 * d.L);
  const double k = std::ceil((std::sqrt(d.kappa) + 1.0) / 2.0 *
                             std::log(d.kappa * c.ell / (2.0 * hess_acc)));
  return static_cast<int>(std::max(0.0, k));
}

std::int64_t schedule_Kt(std::int64_t t, double kappa, double teps, double s_prev_norm,
                         double y0_norm_bound) {
  if (!(teps > 0.0)) throw std::invalid_argument("schedule_Kt: eps_tilde must be positive");
  if (!(kappa >= 1.0)) throw std::invalid_argument("schedule_Kt: kappa must be at least 1");
  if (t < 0) throw std::invalid_argument("schedule_Kt: t must be non-negative");
  const double dist = t == 0 ? y0_norm_bound : teps + kappa * s_prev_norm;
  if (!(dist > 0.0)) return 0;
  const double k = std::ceil(2.0 * std::sqrt(kappa) * std::log(std::sqrt(kappa + 1.0) / teps * dist));
  if (!std::isfinite(k)) throw std::invalid_argument("schedule_Kt: non-finite iteration count");
  return static_cast<std::int64_t>(std::max(0.0, k));
}

std::int64_t mcn_T_bound(double gap, double M, double eps_prime) {
  const double T = std::ceil(192.0 * std::max(0.0, gap) * std::sqrt(M) * std::pow(eps_prime, -1.5)) + 1.0;
  return static_cast<std::int64_t>(std::min(T, 9.0e18));
}

std::int64_t imcn_T_bound(double gap, double M, double eps) {
  const double T = std::ceil(626.0 * std::max(0.0, gap) * std::sqrt(M) * std::pow(eps, -1.5));
  return static_cast<std::int64_t>(std::min(T, 9.0e18));
}

namespace {

void validate(const SolverConfig& cfg, Algorithm a) {
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("solver: eps must be positive");
  if (a == Algorithm::imcn && !(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw std::invalid_argument("solver: delta must lie in (0, 1)");
  }
  if (cfg.C_g && !(*cfg.C_g > 0.0)) throw std::invalid_argument("solver: C_g must be positive");
  if (cfg.C_H && !(*cfg.C_H > 0.0)) throw std::invalid_argument("solver: C_H must be positive");
  if (!(cfg.C_sigma > 0.0 && cfg.C_sigma <= 1.0)) {
    throw std::invalid_argument("solver: C_sigma must lie in (0, 1]");
  }
  if (cfg.T_max && *cfg.T_max < 1) throw std::invalid_argument("solver: T_max must be at least 1");
  if (cfg.Kp && *cfg.Kp < 0) throw std::invalid_argument("solver: Kp must be non-negative");
  if (cfg.gd_budget && *cfg.gd_budget < 0) throw std::invalid_argument("solver: gd_budget must be non-negative");
  if (cfg.y0_radius_estimate && !(*cfg.y0_radius_estimate >= 0.0)) {
    throw std::invalid_argument("solver: y0_radius_estimate must be non-negative");
  }
}

/// State shared by both outer loops: the counted problem copy, the inner AGD
/// and the primal-value logger.
class OuterLoop {
 public:
  OuterLoop(const MinimaxProblem& p, const Vector& x0, const SolverConfig& cfg,
            const RunOptions& opts, Algorithm a)
      : q_(p.with_fresh_counters()), cfg_(cfg), opts_(opts), k_(p.derived()) {
    if (x0.size() != p.dim_x()) {
      std::ostringstream msg;
      msg << "x0 has length " << x0.size() << ", expected " << p.dim_x();
      throw std::invalid_argument(msg.str());
    }
    if (!all_finite(x0)) throw std::invalid_argument("x0 must be finite");
    trace_.algorithm = a;
    agd_ = agd_params_for(p.ell(), p.mu(), 0);
  }

  const MinimaxProblem& q() const { return q_; }
  const DerivedConstants& k() const { return k_; }
  RunTrace& trace() { return trace_; }

  /// P at x from the closed form if present, else an AGD estimate on an
  /// uncounted copy of the problem.
  std::optional<double> primal(const Vector& x, bool& approximate) const {
    approximate = false;
    if (opts_.closed && opts_.closed->primal) return opts_.closed->primal(x);
    approximate = true;
    const auto shadow = q_.with_fresh_counters();
    return eval_primal(shadow, x, std::max(trace_.eps_tilde / 10.0, 1e-14)).value;
  }

  /// Sets T from P* when it is known, else from T_max.
  void set_cap(const Vector& x0, const std::function<std::int64_t(double)>& bound) {
    std::optional<double> pstar = cfg_.P_star;
    if (!pstar && opts_.closed) pstar = opts_.closed->primal_min;
    bool approx = false;
    if (pstar || cfg_.log_primal) trace_.P0 = primal(x0, approx);
    trace_.P_star = pstar;
    if (pstar) {
      trace_.T = std::max<std::int64_t>(1, bound(*trace_.P0 - *pstar));
      trace_.T_from_theorem = true;
      if (cfg_.T_max) trace_.T = std::min(trace_.T, *cfg_.T_max);
    } else {
      trace_.T = cfg_.T_max.value_or(kDefaultTMax);
    }
  }

  /// Initial inner solve from y = 0.
  Vector initial_y(const Vector& x0, std::int64_t& K0) {
    double r0 = 0.0;
    const Vector zero = Vector::Zero(q_.dim_y());
    if (cfg_.y0_radius_estimate) {
      r0 = *cfg_.y0_radius_estimate;
    } else {
      r0 = q_.grad_y(x0, zero).norm() / q_.mu();
    }
    K0 = schedule_Kt(0, k_.kappa, trace_.eps_tilde, 0.0, r0);
    return inner(x0, zero, K0);
  }

  Vector inner(const Vector& x, const Vector& y, std::int64_t K) {
    AgdParams params = agd_;
    params.K = K;
    return agd_minimize([&](const Vector& v) -> Vector { return -q_.grad_y(x, v); }, y, params);
  }

  void emit(IterationRecord rec, const Vector& x) {
    if (cfg_.log_primal) rec.P = primal(x, rec.P_approximate);
    rec.counters = q_.counters();
    if (opts_.sink) opts_.sink(rec);
    trace_.records.push_back(std::move(rec));
  }

  void finish(StopReason reason, Vector x_hat, Vector y_last, std::int64_t iterations) {
    trace_.reason = reason;
    trace_.x_hat = std::move(x_hat);
    trace_.y_last = std::move(y_last);
    trace_.iterations = iterations;
    trace_.counters = q_.counters();
  }

 private:
  MinimaxProblem q_;
  SolverConfig cfg_;
  RunOptions opts_;
  DerivedConstants k_;
  AgdParams agd_;
  RunTrace trace_;
};

}  // namespace

RunTrace mcn_run(const MinimaxProblem& p, const Vector& x0, const SolverConfig& cfg,
                 const RunOptions& opts) {
  validate(cfg, Algorithm::mcn);
  OuterLoop loop(p, x0, cfg, opts, Algorithm::mcn);
  const auto& q = loop.q();
  const double M = loop.k().M;
  const double eps_p = mcn_eps_prime(cfg.eps);
  RunTrace& tr = loop.trace();
  tr.eps_break = eps_p;
  tr.eps_tilde = mcn_eps_tilde(q.constants(), eps_p, cfg.C_g.value_or(default_C_g(Algorithm::mcn)),
                               cfg.C_H.value_or(default_C_H(Algorithm::mcn)));
  loop.set_cap(x0, [&](double gap) { return mcn_T_bound(gap, M, eps_p); });
  const double small_step = 0.5 * std::sqrt(eps_p / M);

  std::int64_t K = 0;
  Vector y = loop.initial_y(x0, K);
  Vector x = x0;
  double s_prev = 0.0;
  for (std::int64_t t = 0; t < tr.T; ++t) {
    if (t > 0) {
      K = schedule_Kt(t, loop.k().kappa, tr.eps_tilde, s_prev, 0.0);
      y = loop.inner(x, y, K);
    }
    const Vector g = q.grad_x(x, y);
    const Matrix H = schur_complement(q.hessian(x, y));
    const CubicSolution sol = solve_cubic_exact({g, H, M});

    IterationRecord rec;
    rec.t = t;
    rec.K_t = K;
    rec.s_norm = sol.s.norm();
    rec.model_value = sol.model_value;
    rec.model_decrease = -sol.model_value;
    rec.g_norm = g.norm();
    rec.branch = "exact";
    loop.emit(std::move(rec), x);

    if (sol.s.norm() <= small_step) {
      loop.finish(StopReason::break_smallstep, x + sol.s, y, t + 1);
      return tr;
    }
    x += sol.s;
    s_prev = sol.s.norm();
  }
  loop.finish(StopReason::iteration_cap, x, y, tr.T);
  return tr;
}

RunTrace imcn_run(const MinimaxProblem& p, const Vector& x0, const SolverConfig& cfg,
                  const RunOptions& opts) {
  validate(cfg, Algorithm::imcn);
  OuterLoop loop(p, x0, cfg, opts, Algorithm::imcn);
  const auto& q = loop.q();
  const double L = loop.k().L;
  const double M = loop.k().M;
  const double eps = cfg.eps;
  if (eps > L * L / M) {
    std::ostringstream msg;
    msg << "imcn: eps = " << eps << " exceeds L^2/M = " << L * L / M
        << "; the second-order condition is vacuous there, use a first-order method";
    throw std::invalid_argument(msg.str());
  }
  const double C_H = cfg.C_H.value_or(default_C_H(Algorithm::imcn));
  RunTrace& tr = loop.trace();
  tr.eps_break = eps;
  tr.eps_tilde = imcn_eps_tilde(q.constants(), eps, cfg.C_g.value_or(default_C_g(Algorithm::imcn)), C_H);
  tr.Kp = cfg.Kp.value_or(imcn_Kp(q.constants(), eps, C_H));
  loop.set_cap(x0, [&](double gap) { return imcn_T_bound(gap, M, eps); });
  const double delta_p = cfg.delta / static_cast<double>(tr.T);
  tr.gd_budget = cfg.gd_budget.value_or(
      iteration_budget(eps, delta_p, L, M, cfg.C_sigma, C_H, q.dim_x()));
  tr.sigma = sigma_value(eps, L, M, cfg.C_sigma);
  const double delta_threshold = -std::sqrt(eps * eps * eps / M) / 128.0;
  const int Kp = tr.Kp;

  std::int64_t K = 0;
  Vector y = loop.initial_y(x0, K);
  Vector x = x0;
  double s_prev = 0.0;
  for (std::int64_t t = 0; t < tr.T; ++t) {
    if (t > 0) {
      K = schedule_Kt(t, loop.k().kappa, tr.eps_tilde, s_prev, 0.0);
      y = loop.inner(x, y, K);
    }
    const Vector g = q.grad_x(x, y);
    const CubicModel model{
        g, LinearOperator([&q, &x, &y, Kp](const Vector& v) { return hvp_primal(q, x, y, Kp, v); }), M};

    IterationRecord rec;
    rec.t = t;
    rec.K_t = K;
    rec.g_norm = g.norm();
    CubicSolution sol;
    if (g.norm() >= L * L / M) {
      sol = cauchy_point(model);
      rec.branch = "cauchy";
    } else {
      sol = cubic_solver_gd(model, L, tr.sigma, tr.gd_budget,
                            mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(t)));
      rec.branch = "gd";
    }
    rec.s_norm = sol.s.norm();
    rec.delta = sol.model_value;
    rec.model_value = sol.model_value;
    rec.model_decrease = -sol.model_value;
    rec.inner_steps = sol.iterations;

    if (sol.model_value > delta_threshold) {
      const Vector s_hat = final_cubic_solver(model, L, eps, final_solver_cap(L, M, eps, g.norm()));
      loop.emit(std::move(rec), x);
      loop.finish(StopReason::break_delta, x + s_hat, y, t + 1);
      return tr;
    }
    loop.emit(std::move(rec), x);
    x += sol.s;
    s_prev = sol.s.norm();
  }
  loop.finish(StopReason::iteration_cap, x, y, tr.T);
  return tr;
}

RunTrace run_solver(Algorithm a, const MinimaxProblem& p, const Vector& x0,
                    const SolverConfig& cfg, const RunOptions& opts) {
  return a == Algorithm::mcn ? mcn_run(p, x0, cfg, opts) : imcn_run(p, x0, cfg, opts);
}

RefineResult refine_local_minimax(const MinimaxProblem& p, const Vector& x_hat,
                                  const Vector& y_last, double alpha, double beta,
                                  const SolverConfig& cfg) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("refine: alpha and beta must be positive");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("refine: eps must be positive");
  if (x_hat.size() != p.dim_x() || y_last.size() != p.dim_y()) {
    throw std::invalid_argument("refine: point dimensions do not match the problem");
  }
  const auto k = p.derived();
  const double ell = p.ell();
  const double rho = p.rho();
  const double teps = mcn_eps_tilde(p.constants(), mcn_eps_prime(cfg.eps),
                                    cfg.C_g.value_or(default_C_g(Algorithm::mcn)),
                                    cfg.C_H.value_or(default_C_H(Algorithm::mcn)));
  const double start_dist = teps + k.kappa * std::pow(2.0, -2.25) * std::sqrt(cfg.eps / k.M);
  const double target = std::min(alpha / (2.0 * ell), beta / (8.0 * k.kappa * k.kappa * rho));
  const double Kh = std::ceil(2.0 * std::sqrt(k.kappa) *
                              std::log(std::sqrt(k.kappa + 1.0) * start_dist / target));

  RefineResult r;
  r.x_hat = x_hat;
  r.K_hat = static_cast<std::int64_t>(std::max(0.0, Kh));
  AgdParams params = agd_params_for(ell, p.mu(), r.K_hat);
  r.y_hat = agd_minimize([&](const Vector& v) -> Vector { return -p.grad_y(x_hat, v); }, y_last, params);

  const Vector gx = p.grad_x(x_hat, r.y_hat);
  const Vector gy = p.grad_y(x_hat, r.y_hat);
  r.grad_norm = std::sqrt(gx.squaredNorm() + gy.squaredNorm());
  r.schur_min_eig = min_eigenvalue(schur_complement(p.hessian(x_hat, r.y_hat)));
  r.grad_pass = r.grad_norm <= alpha;
  r.curvature_pass = r.schur_min_eig >= -beta;
  r.eps_compatible = cfg.eps <= std::min(alpha / 3.0, beta * beta / (8.0 * k.kappa * k.kappa * k.kappa * rho));
  return r;
}

}  // namespace minimax_cubic
