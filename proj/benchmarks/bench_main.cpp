#include <benchmark/benchmark.h>

#include "acceldse/dse.hpp"
#include "acceldse/oracle.hpp"
#include "acceldse/param_space.hpp"
#include "acceldse/rng.hpp"
#include "acceldse/sampling.hpp"
#include "acceldse/surrogate/tree.hpp"

using namespace acceldse;

namespace {

ParameterSpace bench_space() {
  return ParameterSpace({
      ParameterSpec{"bitwidth", ParamKind::Int, 4, 32, {}, false},
      ParameterSpec{"dimension", ParamKind::Int, 5, 60, {}, false},
      ParameterSpec{"num_cycles", ParamKind::Int, 1, 25, {}, false},
  });
}

void bm_lhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lhs(5, n, 7));
}

void bm_sobol(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    SobolSampler sampler(5);
    benchmark::DoNotOptimize(sampler.next(n));
  }
}

void bm_gbdt_train(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  Matrix x(n, std::vector<double>(6));
  std::vector<double> y;
  for (auto& row : x) {
    for (double& v : row) v = rng.uniform();
    y.push_back(row[0] * row[1] + 2.0 * row[2]);
  }
  TreeEnsembleHp hp;
  hp.n_estimators = 100;
  for (auto _ : state) {
    GbdtRegressor model;
    model.fit(x, y, hp);
    benchmark::DoNotOptimize(model);
  }
}

void bm_pareto_front(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  std::vector<Trial> trials(n);
  for (auto& t : trials) {
    t.feasible = true;
    t.has_objectives = true;
    t.energy_mj = rng.uniform();
    t.area_um2 = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(pareto_front(trials));
}

void bm_oracle(benchmark::State& state) {
  const ParameterSpace space = bench_space();
  Configuration cfg;
  cfg.values = {{"bitwidth", 16.0}, {"dimension", 30.0}, {"num_cycles", 8.0}};
  const BackendKnobs knobs{1.2, 0.7};
  const OracleParams params;
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_backend(space, cfg, knobs, params));
}

BENCHMARK(bm_lhs)->Arg(64)->Arg(256);
BENCHMARK(bm_sobol)->Arg(64)->Arg(1024);
BENCHMARK(bm_gbdt_train)->Arg(200)->Arg(800);
BENCHMARK(bm_pareto_front)->Arg(200)->Arg(2000);
BENCHMARK(bm_oracle);

}  // namespace

BENCHMARK_MAIN();
