#include <benchmark/benchmark.h>

#include "chemo4d/elliptic.hpp"
#include "chemo4d/evolution.hpp"
#include "chemo4d/functionals.hpp"
#include "chemo4d/picard.hpp"

using namespace chemo4d;

namespace {

const Params kUnit{1.0, 1.0, 1.0, 1.0};

GridPtr grid_of(benchmark::State& state) {
  return build_grid(20.0, static_cast<std::size_t>(state.range(0)));
}

void HelmholtzFactorize(benchmark::State& state) {
  auto g = grid_of(state);
  for (auto _ : state) {
    HelmholtzSolver solver(g, 1.0, 1.0);
    benchmark::DoNotOptimize(solver);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(HelmholtzFactorize)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void HelmholtzSolve(benchmark::State& state) {
  auto g = grid_of(state);
  const HelmholtzSolver solver(g, 1.0, 1.0);
  const Field f = gaussian_bump(1.0, 50.0, g);
  for (auto _ : state) {
    Field v = solver.solve(f);
    benchmark::DoNotOptimize(v);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(HelmholtzSolve)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void PoissonSolve(benchmark::State& state) {
  auto g = grid_of(state);
  const Field f = gaussian_bump(1.0, 50.0, g);
  for (auto _ : state) {
    PoissonResult r = poisson_solve_signed(f);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(PoissonSolve)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void HeatSemigroup(benchmark::State& state) {
  auto g = grid_of(state);
  const Field f = gaussian_bump(1.0, 50.0, g);
  for (auto _ : state) {
    Field out = heat_semigroup(f, 1.0, 1.0, 0.1, 16);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(HeatSemigroup)->Arg(512)->Arg(2048);

void ImexStep(benchmark::State& state) {
  auto g = grid_of(state);
  const double m = 0.5 * threshold_constants(kUnit).M_bounded;
  const State s = make_state(0.0, gaussian_bump(1.0, m, g),
                             0.01 * gaussian_bump(1.5, 40.0, g),
                             gaussian_bump(1.0, 20.0, g), kUnit);
  StepperConfig cfg;
  for (auto _ : state) {
    StepResult r = step(s, kUnit, 1e-3, cfg);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(ImexStep)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void DiagnosticsEval(benchmark::State& state) {
  auto g = grid_of(state);
  const double m = 0.5 * threshold_constants(kUnit).M_bounded;
  const State s = make_state(0.0, gaussian_bump(1.0, m, g),
                             0.01 * gaussian_bump(1.5, 40.0, g),
                             gaussian_bump(1.0, 20.0, g), kUnit);
  for (auto _ : state) {
    Diagnostics d = compute_diagnostics(s, kUnit);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(DiagnosticsEval)->Arg(512)->Arg(2048);

void PicardIterate(benchmark::State& state) {
  auto g = build_grid(20.0, 256);
  MildData data{gaussian_bump(1.0, 10.0, g), Field(g), Field(g)};
  for (auto _ : state) {
    PicardResult r = picard_iterate(data, kUnit, 0.05, 6, 1e-8, 32);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(PicardIterate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
