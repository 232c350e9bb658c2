#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <minimax_cubic/drivers.hpp>
#include <minimax_cubic/verify.hpp>

#include "config.hpp"
#include "json_out.hpp"

namespace minimax_cubic::cli {

namespace fs = std::filesystem;

namespace {

JsonObject counters_json(const CounterSnapshot& c) {
  JsonObject o;
  o.add("n_grad", c.n_grad).add("n_hvp", c.n_hvp).add("n_hess", c.n_hess).add("n_value", c.n_value);
  return o;
}

JsonObject report_json(const StationarityReport& r) {
  JsonObject o;
  o.add("grad_norm", r.grad_norm)
      .add("min_eig", r.min_eig)
      .add("eps", r.eps)
      .add("delta_2nd", r.delta_2nd)
      .add("fsp_pass", r.fsp_pass)
      .add("ssp_pass", r.ssp_pass)
      .add("inner_accuracy", r.inner_accuracy);
  return o;
}

JsonObject record_json(const IterationRecord& r) {
  JsonObject o;
  o.add("type", "iteration")
      .add("t", r.t)
      .add("K_t", r.K_t)
      .add("s_norm", r.s_norm)
      .add("delta", r.delta)
      .add("model_value", r.model_value)
      .add("model_decrease", r.model_decrease)
      .add("g_norm", r.g_norm)
      .add("P", r.P)
      .add("P_approximate", r.P_approximate)
      .add("branch", r.branch)
      .add("inner_steps", r.inner_steps)
      .add("counters", counters_json(r.counters));
  return o;
}

JsonObject terminal_json(const RunTrace& tr) {
  JsonObject o;
  o.add("type", "terminal")
      .add("reason", to_string(tr.reason))
      .add("iterations", tr.iterations)
      .add("x_hat", tr.x_hat)
      .add("counters", counters_json(tr.counters));
  return o;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ConfigError("write to '" + path.string() + "' failed");
}

struct RunOutcome {
  RunTrace trace;
  StationarityReport report;
  DerivedConstants constants;
};

RunOutcome execute(const ExperimentConfig& cfg, const TraceSink& sink) {
  const ProblemInstance inst = build_problem(cfg);
  const Vector x0 = start_point(cfg);
  RunOptions ro;
  ro.closed = &inst.closed;
  ro.sink = sink;
  RunOutcome out;
  out.trace = run_solver(cfg.algorithm, inst.problem, x0, cfg.solver, ro);
  out.constants = inst.problem.derived();
  const auto verifier = inst.problem.with_fresh_counters();
  out.report = check_stationarity(verifier, out.trace.x_hat, cfg.solver.eps,
                                  std::sqrt(out.constants.M * cfg.solver.eps), cfg.inner_tol);
  return out;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: invalid input: " << e.what() << "\n";
  } catch (const IterationCapError& e) {
    err << "error: iteration cap: " << e.what() << "\n";
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

}  // namespace

int cmd_run(const fs::path& config, const CommandOptions& opts, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = load_config(config);
    if (opts.seed) cfg.solver.rng_seed = *opts.seed;
    if (opts.trace) cfg.output.trace = opts.trace;
    const bool quiet = opts.quiet || cfg.output.verbosity == Verbosity::quiet;
    const bool verbose = !quiet && cfg.output.verbosity == Verbosity::verbose;

    std::ofstream trace_file;
    if (cfg.output.trace) {
      trace_file.open(*cfg.output.trace, std::ios::binary);
      if (!trace_file) throw ConfigError("cannot write trace '" + cfg.output.trace->string() + "'");
    }
    TraceSink sink = [&](const IterationRecord& r) {
      if (trace_file.is_open()) trace_file << record_json(r).str() << "\n";
      if (verbose) {
        err << "t=" << r.t << " K_t=" << r.K_t << " |g|=" << format_double(r.g_norm)
            << " |s|=" << format_double(r.s_norm) << " m(s)=" << format_double(r.model_value)
            << " branch=" << r.branch << "\n";
      }
    };

    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome res = execute(cfg, sink);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (trace_file.is_open()) {
      trace_file << terminal_json(res.trace).str() << "\n";
      trace_file.close();
      if (!trace_file) throw ConfigError("write to trace file failed");
    }

    const RunTrace& tr = res.trace;
    JsonObject summary;
    summary.add("version", "v1")
        .add("algorithm", to_string(cfg.algorithm))
        .add("problem", cfg.problem_kind())
        .add("eps", cfg.solver.eps)
        .add("seed", cfg.solver.rng_seed)
        .add("reason", to_string(tr.reason))
        .add("iterations", tr.iterations)
        .add("T", tr.T)
        .add("T_from_theorem", tr.T_from_theorem)
        .add("eps_tilde", tr.eps_tilde)
        .add("kappa", res.constants.kappa)
        .add("L", res.constants.L)
        .add("M", res.constants.M)
        .add("P0", tr.P0)
        .add("P_star", tr.P_star);
    if (cfg.algorithm == Algorithm::imcn) {
      summary.add("Kp", tr.Kp).add("gd_budget", tr.gd_budget).add("sigma", tr.sigma);
    }
    summary.add("x_hat", tr.x_hat)
        .add("counters", counters_json(tr.counters))
        .add("stationarity", report_json(res.report))
        .add("wall_time_s", wall);
    const std::string text = summary.str() + "\n";
    if (cfg.output.summary) write_text(*cfg.output.summary, text);
    if (!quiet) out << text;
    return res.report.ssp_pass ? kExitPass : kExitFail;
  });
}

int cmd_verify(const fs::path& config, const fs::path& point, const CommandOptions& opts,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_config(config);
    const ProblemInstance inst = build_problem(cfg);
    const Vector x = load_point(point);
    if (x.size() != inst.problem.dim_x()) {
      throw ConfigError("point: length " + std::to_string(x.size()) + " does not match d_x = " +
                        std::to_string(inst.problem.dim_x()));
    }
    const double M = inst.problem.derived().M;
    const StationarityReport r =
        check_stationarity(inst.problem, x, cfg.solver.eps, std::sqrt(M * cfg.solver.eps), cfg.inner_tol);
    if (!opts.quiet) out << report_json(r).str() << "\n";
    return r.ssp_pass ? kExitPass : kExitFail;
  });
}

unsigned bench_threads(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MINIMAX_CUBIC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

int cmd_bench(const fs::path& suite_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const SuiteSpec suite = load_suite(suite_path);
    if (suite.configs.empty()) throw ConfigError("suite: no configs listed");

    struct Job {
      fs::path config;
      std::optional<double> eps;
      std::optional<std::uint64_t> seed;
    };
    std::vector<Job> jobs;
    for (const auto& c : suite.configs) {
      std::vector<std::optional<double>> eps_grid(suite.eps.begin(), suite.eps.end());
      if (eps_grid.empty()) eps_grid.push_back(std::nullopt);
      std::vector<std::optional<std::uint64_t>> seed_grid(suite.seeds.begin(), suite.seeds.end());
      if (seed_grid.empty()) seed_grid.push_back(opts.seed);
      for (const auto& e : eps_grid) {
        for (const auto& s : seed_grid) jobs.push_back({c, e, s});
      }
    }

    std::vector<std::string> rows(jobs.size());
    std::vector<bool> failed(jobs.size(), false);
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    auto worker = [&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        const Job& job = jobs[i];
        std::string algorithm;
        std::string eps_text = job.eps ? format_double(*job.eps) : "";
        std::string seed_text = job.seed ? std::to_string(*job.seed) : "";
        try {
          ExperimentConfig cfg = load_config(job.config);
          if (job.eps) cfg.solver.eps = *job.eps;
          if (job.seed) cfg.solver.rng_seed = *job.seed;
          algorithm = to_string(cfg.algorithm);
          eps_text = format_double(cfg.solver.eps);
          seed_text = std::to_string(cfg.solver.rng_seed);
          const RunOutcome res = execute(cfg, {});
          const RunTrace& tr = res.trace;
          const auto& k = res.constants;
          const double eps = cfg.solver.eps;
          const double iter_ratio = tr.T_from_theorem ? double(tr.iterations) / double(tr.T) : NAN;
          const double rho = k.M / (4.0 * std::sqrt(2.0) * k.kappa * k.kappa * k.kappa);
          const double ell = k.L / (2.0 * k.kappa);
          const double grad_scale = k.kappa * k.kappa * std::sqrt(rho) * std::pow(eps, -1.5);
          const double hvp_scale = std::pow(k.kappa, 1.5) * ell * std::pow(eps, -2.0);
          std::string row = csv_field(job.config.string()) + "," + algorithm + "," + eps_text + "," +
                            seed_text + "," + std::to_string(tr.iterations) + "," +
                            std::to_string(tr.T) + "," + std::to_string(tr.counters.n_grad) + "," +
                            std::to_string(tr.counters.n_hvp) + "," +
                            std::to_string(tr.counters.n_hess) + "," +
                            (res.report.fsp_pass ? "true" : "false") + "," +
                            (res.report.ssp_pass ? "true" : "false") + "," +
                            format_double(res.report.grad_norm) + "," +
                            format_double(res.report.min_eig) + "," +
                            (std::isfinite(iter_ratio) ? format_double(iter_ratio) : "") + "," +
                            format_double(double(tr.counters.n_grad) / grad_scale) + "," +
                            format_double(double(tr.counters.n_hvp) / hvp_scale) + "," +
                            to_string(tr.reason);
          rows[i] = std::move(row);
        } catch (const std::exception& e) {
          failed[i] = true;
          rows[i] = csv_field(job.config.string()) + "," + algorithm + "," + eps_text + "," +
                    seed_text + ",,,,,,,,,,,,," + csv_field(std::string("error: ") + e.what());
          std::lock_guard<std::mutex> lock(err_mutex);
          err << "error: " << job.config.string() << ": " << e.what() << "\n";
        }
      }
    };
    const unsigned n_threads = bench_threads(jobs.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::string csv =
        "config,algorithm,eps,seed,iterations,T,n_grad,n_hvp,n_hess,fsp_pass,ssp_pass,grad_norm,"
        "min_eig,iter_bound_ratio,grad_scaling_ratio,hvp_scaling_ratio,status\n";
    for (const auto& r : rows) csv += r + "\n";
    if (suite.csv) {
      write_text(*suite.csv, csv);
      if (!opts.quiet) out << csv;
    } else {
      out << csv;
    }
    for (bool f : failed) {
      if (f) return kExitError;
    }
    return kExitPass;
  });
}

}  // namespace minimax_cubic::cli
