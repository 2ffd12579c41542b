#include <benchmark/benchmark.h>

#include "decs/linalg.hpp"
#include "decs/score.hpp"
#include "decs/simulate.hpp"

namespace {

using decs::Matrix;

decs::simulate::GeneratedInstance instance(int p, int n) {
  decs::simulate::SemSpec spec;
  spec.p = p;
  spec.q = 5;
  spec.n = n;
  spec.graph = decs::simulate::ErGraph{static_cast<double>(p)};
  spec.seed = 17;
  return decs::simulate::sample_sem(spec);
}

Matrix random_weights(int p) {
  decs::Rng rng(3);
  Matrix w(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) w(i, j) = i == j ? 0.0 : 0.3 * rng.normal();
  }
  return w;
}

void BM_Acyclicity(benchmark::State& state) {
  const Matrix w = random_weights(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decs::linalg::acyclicity(w));
}
BENCHMARK(BM_Acyclicity)->Arg(10)->Arg(50)->Arg(100)->Arg(200);

void BM_Trim(benchmark::State& state) {
  const Matrix x = instance(static_cast<int>(state.range(0)), 100).data.values();
  for (auto _ : state) benchmark::DoNotOptimize(decs::linalg::trim_transform(x));
}
BENCHMARK(BM_Trim)->Arg(20)->Arg(100)->Arg(200);

void BM_Solve(benchmark::State& state) {
  const auto inst = instance(static_cast<int>(state.range(0)), 200);
  decs::score::ScoreConfig cfg;
  cfg.lambda = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(decs::score::solve_decs(inst.data, cfg));
}
BENCHMARK(BM_Solve)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
