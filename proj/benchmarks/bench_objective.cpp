#include <benchmark/benchmark.h>

#include <random>

#include "crdist/channel_objective.hpp"
#include "crdist/measurement.hpp"

namespace {

Eigen::MatrixXd random_channel(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(1.0);
  Eigen::MatrixXd q(rows, cols);
  for (int x = 0; x < rows; ++x) {
    for (int u = 0; u < cols; ++u) q(x, u) = ex(rng);
    q.row(x) /= q.row(x).sum();
  }
  return q;
}

void objective_gradient(benchmark::State& state, const char* name, crdist::ChannelObjective::Path path) {
  const crdist::CQEnsemble e = crdist::named_ensemble(name);
  const crdist::ChannelObjective obj(e, path);
  const int nx = static_cast<int>(e.size());
  const Eigen::MatrixXd q = random_channel(nx, nx + 1, 4);
  Eigen::MatrixXd gx, gq;
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(q, gx, gq));
}

void BM_ObjectiveQubit(benchmark::State& state) {
  objective_gradient(state, "bb84", crdist::ChannelObjective::Path::Auto);
}
BENCHMARK(BM_ObjectiveQubit);

void BM_ObjectiveGeneric(benchmark::State& state) {
  objective_gradient(state, "bb84", crdist::ChannelObjective::Path::Generic);
}
BENCHMARK(BM_ObjectiveGeneric);

void BM_ObjectiveQutrit(benchmark::State& state) {
  objective_gradient(state, "three_state", crdist::ChannelObjective::Path::Auto);
}
BENCHMARK(BM_ObjectiveQutrit);

void BM_PovmObjective(benchmark::State& state) {
  const crdist::BipartiteState rho = crdist::ehs_bipartite(crdist::named_ensemble("two_state"));
  const crdist::PovmObjective obj(rho);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<crdist::CVector> kets(4, crdist::CVector(2));
  for (auto& k : kets)
    for (int i = 0; i < 2; ++i) k[i] = crdist::cplx(g(rng), g(rng));
  std::vector<crdist::CVector> grad;
  for (auto _ : state) benchmark::DoNotOptimize(obj.value_and_gradient(kets, grad));
}
BENCHMARK(BM_PovmObjective);

}  // namespace
