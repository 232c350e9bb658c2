#include <random>

#include <benchmark/benchmark.h>

#include <minimax_cubic/agd.hpp>
#include <minimax_cubic/chebyshev.hpp>
#include <minimax_cubic/cubic.hpp>
#include <minimax_cubic/drivers.hpp>

namespace mc = minimax_cubic;
using mc::Matrix;
using mc::Vector;

namespace {

Vector random_vector(int d, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = n(gen);
  return v;
}

Matrix random_symmetric(int d, std::mt19937_64& gen) {
  Matrix a = random_vector(d * d, gen).reshaped(d, d);
  return 0.5 * (a + a.transpose());
}

mc::ProblemInstance coupled_saddle(int dx, int dy) {
  std::mt19937_64 gen(7);
  mc::SaddleSpec s;
  s.dim_x = dx;
  s.dim_y = dy;
  s.mu = 2.0;
  s.box_radius = 2.0;
  s.coupling = 0.3 * random_vector(dx * dy, gen).reshaped(dx, dy);
  return mc::make_saddle_problem(s);
}

void BM_SolveCubicExact(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 gen(1);
  const mc::CubicModel m{random_vector(d, gen), random_symmetric(d, gen), 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(mc::solve_cubic_exact(m));
}
BENCHMARK(BM_SolveCubicExact)->Arg(5)->Arg(20)->Arg(50);

void BM_HvpPrimal(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto inst = coupled_saddle(d, d);
  std::mt19937_64 gen(2);
  const Vector x = 0.5 * random_vector(d, gen);
  const Vector y = random_vector(d, gen);
  const Vector u = random_vector(d, gen);
  for (auto _ : state) benchmark::DoNotOptimize(mc::hvp_primal(inst.problem, x, y, 10, u));
}
BENCHMARK(BM_HvpPrimal)->Arg(5)->Arg(20)->Arg(50);

void BM_Agd(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 gen(3);
  const Matrix A = random_symmetric(d, gen);
  const Matrix S = A * A.transpose() + Matrix::Identity(d, d);
  const Vector b = random_vector(d, gen);
  const double ell = S.norm();
  auto grad = [&](const Vector& y) -> Vector { return S * y - b; };
  const auto params = mc::agd_params_for(ell, 1.0, 100);
  for (auto _ : state) benchmark::DoNotOptimize(mc::agd_minimize(grad, Vector::Zero(d), params));
}
BENCHMARK(BM_Agd)->Arg(5)->Arg(20)->Arg(50);

void BM_McnSaddle(benchmark::State& state) {
  mc::SaddleSpec s;
  s.mu = 24.0;
  const auto inst = mc::make_saddle_problem(s);
  mc::SolverConfig cfg;
  cfg.eps = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc::mcn_run(inst.problem, Vector::Constant(1, 0.05), cfg, {&inst.closed, {}}));
  }
}
BENCHMARK(BM_McnSaddle)->Unit(benchmark::kMillisecond);

void BM_ImcnSaddle(benchmark::State& state) {
  mc::SaddleSpec s;
  s.mu = 24.0;
  const auto inst = mc::make_saddle_problem(s);
  mc::SolverConfig cfg;
  cfg.eps = 1e-2;
  cfg.rng_seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc::imcn_run(inst.problem, Vector::Zero(1), cfg, {&inst.closed, {}}));
  }
}
BENCHMARK(BM_ImcnSaddle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
