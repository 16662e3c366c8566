#include <benchmark/benchmark.h>

#include "mf/initialization.hpp"
#include "mf/problems.hpp"
#include "mf/solvers.hpp"

namespace {

mf::Problem sym_problem(int m, int r) {
  mf::TargetSpec s;
  s.m = m;
  s.n = m;
  s.spectrum = mf::parse_spectrum("geo:1,0.01," + std::to_string(r));
  s.seed = mf::Seed(1);
  return mf::make_problem(s, r);
}

mf::Matrix sketch(const mf::Problem& p) {
  mf::InitSpec s;
  s.seed = mf::Seed(7);
  return mf::initialize(p, s).x0;
}

void BM_ScaledGDSymStep(benchmark::State& state) {
  const auto p = sym_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const mf::Matrix x = sketch(p);
  for (auto _ : state) benchmark::DoNotOptimize(mf::scaledgd_sym_step(x, p.a, 0.5, mf::PrecondMode::inverse));
}
BENCHMARK(BM_ScaledGDSymStep)->Args({100, 10})->Args({100, 20})->Args({1000, 20});

void BM_ScaledGDPinvStep(benchmark::State& state) {
  const auto p = sym_problem(static_cast<int>(state.range(0)), 10);
  const mf::Matrix x = mf::gaussian(p.rows(), state.range(1), 1.0, mf::Seed(3));
  for (auto _ : state) benchmark::DoNotOptimize(mf::scaledgd_sym_step(x, p.a, 0.5, mf::PrecondMode::pseudo));
}
BENCHMARK(BM_ScaledGDPinvStep)->Args({100, 30});

void BM_GDStep(benchmark::State& state) {
  const auto p = sym_problem(static_cast<int>(state.range(0)), 20);
  mf::IterState s;
  s.x = sketch(p);
  for (auto _ : state) benchmark::DoNotOptimize(mf::gd_step(s, p.a, 0.01));
}
BENCHMARK(BM_GDStep)->Arg(100)->Arg(1000);

void BM_Svd(benchmark::State& state) {
  const auto n = state.range(0);
  const mf::Matrix a = mf::gaussian(n, n, 1.0, mf::Seed(5));
  for (auto _ : state) benchmark::DoNotOptimize(mf::svd(a));
}
BENCHMARK(BM_Svd)->Arg(100)->Arg(400);

void BM_OneStepAsym(benchmark::State& state) {
  mf::TargetSpec s;
  s.m = 50;
  s.n = 40;
  s.spectrum = mf::parse_spectrum("geo:1,0.01,8");
  s.symmetric = false;
  s.seed = mf::Seed(1);
  const auto p = mf::make_problem(s, 8);
  mf::InitSpec is;
  is.seed = mf::Seed(2);
  const auto init = mf::initialize(p, is);
  mf::SolverConfig c;
  c.schedule = mf::Schedule::fixed_rate(1.0);
  c.max_iters = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mf::run(p, init, c));
}
BENCHMARK(BM_OneStepAsym);

}  // namespace

BENCHMARK_MAIN();
