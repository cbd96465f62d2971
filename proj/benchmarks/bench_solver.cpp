#include <benchmark/benchmark.h>

#include "crdist/tradeoff.hpp"
#include "crdist/typicality.hpp"

namespace {

void BM_MaximizeLagrangian(benchmark::State& state) {
  const crdist::CQEnsemble e = crdist::named_ensemble("bb84");
  crdist::SolverConfig cfg;
  cfg.starts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crdist::maximize_lagrangian(e, 1.5, cfg));
}
BENCHMARK(BM_MaximizeLagrangian)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SolveDstar(benchmark::State& state) {
  const crdist::CQEnsemble e = crdist::named_ensemble("two_state");
  crdist::SolverConfig cfg;
  cfg.starts = 8;
  for (auto _ : state) benchmark::DoNotOptimize(crdist::solve_dstar(e, 0.2, cfg));
}
BENCHMARK(BM_SolveDstar)->Unit(benchmark::kMillisecond);

void BM_TypicalMass(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const crdist::CMatrix avg = crdist::named_ensemble("three_state").average_state();
  const crdist::ProjectorHandle h = crdist::typical_projector(crdist::DensityMatrix(avg), n, 0.15);
  const std::vector<const crdist::CMatrix*> states(n, &avg);
  for (auto _ : state) benchmark::DoNotOptimize(h.mass(states));
}
BENCHMARK(BM_TypicalMass)->Arg(8)->Arg(16)->Arg(32);

}  // namespace
