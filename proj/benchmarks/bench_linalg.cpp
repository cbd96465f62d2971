#include <benchmark/benchmark.h>

#include <random>

#include "crdist/linalg.hpp"

namespace {

crdist::CMatrix random_hermitian(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  crdist::CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = crdist::cplx(g(rng), g(rng));
  return m + m.adjoint();
}

void BM_EigHermitian(benchmark::State& state) {
  const crdist::CMatrix m = random_hermitian(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(crdist::eig_hermitian(m));
}
BENCHMARK(BM_EigHermitian)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_VnEntropy(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const crdist::CMatrix h = random_hermitian(d, 2);
  const crdist::DensityMatrix rho = crdist::DensityMatrix::normalized(h * h);
  for (auto _ : state) benchmark::DoNotOptimize(crdist::vn_entropy(rho));
}
BENCHMARK(BM_VnEntropy)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_PartialTrace(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const crdist::CMatrix m = random_hermitian(d * d, 3);
  for (auto _ : state) benchmark::DoNotOptimize(crdist::partial_trace(m, d, d, crdist::Keep::B));
}
BENCHMARK(BM_PartialTrace)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
