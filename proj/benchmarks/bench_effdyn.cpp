#include <benchmark/benchmark.h>

#include <cmath>

#include "effdyn/cv_search.hpp"
#include "effdyn/effective.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/kl_objective.hpp"
#include "effdyn/simulate.hpp"
#include "effdyn/spectral.hpp"

using namespace effdyn;

namespace {

// Square 2D double-well grid with `side` cells per axis.
Grid square(std::size_t side) { return Grid::rect({-2.2, 2.2, side}, {-2.0, 2.0, side}); }

TransitionModel reversible_well(std::size_t side) {
  return reversible_part(build_analytic_em(Potential::double_well_2d(1.0, 2.0), 2.0, 0.02, square(side)));
}

void BM_AnalyticOperator(benchmark::State& state) {
  const auto grid = square(static_cast<std::size_t>(state.range(0)));
  const auto pot = Potential::double_well_2d(1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(build_analytic_em(pot, 2.0, 0.02, grid));
}
BENCHMARK(BM_AnalyticOperator)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
  const auto model = reversible_well(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(model, 4));
}
BENCHMARK(BM_Spectrum)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_EffectiveBuild(benchmark::State& state) {
  const auto model = reversible_well(static_cast<std::size_t>(state.range(0)));
  const auto cv = CVAssignment::linear_angle(*model.states()->grid, model.states()->labels, 0.0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(build_effective(model, cv));
}
BENCHMARK(BM_EffectiveBuild)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_KLScore(benchmark::State& state) {
  const auto model = reversible_well(static_cast<std::size_t>(state.range(0)));
  const auto cv = CVAssignment::linear_angle(*model.states()->grid, model.states()->labels, 0.0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(kl_score(model, cv));
}
BENCHMARK(BM_KLScore)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AngleScan(benchmark::State& state) {
  const auto model = reversible_well(24);
  const auto family = CVFamily::linear_angle(12, 10);
  ScanConfig config;
  config.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan(model, family, config));
}
BENCHMARK(BM_AngleScan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SimulateEM(benchmark::State& state) {
  SimConfig cfg;
  cfg.beta = 2.0;
  cfg.dt = 1e-3;
  cfg.n_steps = static_cast<std::size_t>(state.range(0));
  const auto pot = Potential::double_well_2d(1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_em(pot, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateEM)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SimulateLangevin(benchmark::State& state) {
  SimConfig cfg;
  cfg.beta = 1.0;
  cfg.dt = 5e-3;
  cfg.n_steps = static_cast<std::size_t>(state.range(0));
  const auto pot = Potential::harmonic(1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_langevin(pot, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateLangevin)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
