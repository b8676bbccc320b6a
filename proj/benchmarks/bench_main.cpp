#include <benchmark/benchmark.h>

#include <vector>

#include "nmsub/fbe_qp.hpp"
#include "nmsub/mssc.hpp"
#include "nmsub/random.hpp"
#include "nmsub/snsm.hpp"

namespace {

using namespace nmsub;

mssc::ClusteringProblem clustering(std::size_t p, std::size_t s, std::size_t ell) {
  Rng rng(7);
  std::vector<double> values(p * s);
  for (auto& v : values) v = rng.uniform(-4, 4);
  return {mssc::DataSet(p, s, values), ell, 1e-3};
}

void BM_ClusteringSubgradient(benchmark::State& state) {
  const auto prob = clustering(static_cast<std::size_t>(state.range(0)), 4, 5);
  mssc::ClusteringObjective obj(prob);
  const auto x = mssc::random_init(prob, 1);
  for (auto _ : state) benchmark::DoNotOptimize(obj.subgradient(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClusteringSubgradient)->Arg(100)->Arg(1000)->Arg(10000);

void BM_FbeSubgradient(benchmark::State& state) {
  const auto prob = qp::generate_problem(static_cast<std::size_t>(state.range(0)), 1, 3);
  const auto x = qp::random_start(prob, 5);
  for (auto _ : state) benchmark::DoNotOptimize(qp::fbe_subgradient(prob, x));
}
BENCHMARK(BM_FbeSubgradient)->Arg(4)->Arg(16)->Arg(64);

void BM_SnsmClustering(benchmark::State& state) {
  const auto prob = clustering(500, 2, static_cast<std::size_t>(state.range(0)));
  mssc::ClusteringObjective obj(prob);
  mssc::ClusteringDirection dir(prob.data.p(), mssc::AlphaSchedule::constant(prob.alpha));
  SolverParams params;
  params.max_iter = 200;
  const auto x0 = mssc::random_init(prob, 11);
  for (auto _ : state) benchmark::DoNotOptimize(run_snsm(obj, dir, params, x0));
}
BENCHMARK(BM_SnsmClustering)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
