#include <benchmark/benchmark.h>

#include "fiaplab/analytics.hpp"
#include "fiaplab/counting_model.hpp"
#include "fiaplab/replica.hpp"

namespace {

using namespace fiaplab;

FiapSpec gl_spec(int k) {
  InstanceParams params;
  params.node_count = k;
  params.sigma = {0.0, 0.3};
  params.weights.assign(k, std::vector<std::int64_t>(k, 1));
  return builtin_instance("galves-locherbach", params);
}

void BM_StreamUniform(benchmark::State& state) {
  auto stream = derive_stream(1, 0, 0, StreamRole::activation);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.uniform());
  }
}
BENCHMARK(BM_StreamUniform);

void BM_StepReplicaSystem(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int k = 4;
  const auto spec = gl_spec(k);
  ReplicaSystemState sys;
  sys.replica_count = m;
  sys.node_count = k;
  sys.x.assign(static_cast<std::size_t>(m) * k, 2);
  std::uint32_t step = 0;
  for (auto _ : state) {
    auto act = derive_stream(7, 0, step, StreamRole::activation);
    auto rout = derive_stream(7, 0, step, StreamRole::routing);
    benchmark::DoNotOptimize(step_replica_system(spec, sys, act, rout));
    ++step;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m) * k);
}
BENCHMARK(BM_StepReplicaSystem)->Arg(100)->Arg(1000)->Arg(10000);

void BM_CompoundPoissonPmf(benchmark::State& state) {
  const auto law = CompoundPoissonLaw::make(1.5, Pmf({0.0, 0.5, 0.3, 0.2}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compound_poisson_pmf(law, 64));
  }
}
BENCHMARK(BM_CompoundPoissonPmf);

void BM_SolveCountingRate(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_counting_rate(1.0, 1.0, 10));
  }
}
BENCHMARK(BM_SolveCountingRate);

}  // namespace

BENCHMARK_MAIN();
