// Serial reference kernels against their OpenMP counterparts. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>

#include "xld/knn.hpp"
#include "xld/projection.hpp"
#include "xld/synthetic.hpp"

namespace {

using namespace xld;

synthetic::ManifoldSpec spec() {
  synthetic::ManifoldSpec s;
  s.latent_dim = 12;
  s.decay = 0.85;
  return s;
}

const PointSet& points(std::size_t n) {
  static std::map<std::size_t, PointSet> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, synthetic::manifold_points(n, spec(), 3)).first;
  return it->second;
}

const std::vector<std::vector<float>>& queries() {
  static const auto q = synthetic::manifold_queries(64, spec(), 3);
  return q;
}

void BM_ExactQuerySerial(benchmark::State& state) {
  const PointSet& p = points(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::query_exact_serial(p, queries()[i++ % queries().size()], 10, accept_all()));
  }
}

void BM_ExactQuery(benchmark::State& state) {
  const ExactIndex ex(points(static_cast<std::size_t>(state.range(0))));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(query_exact(ex, queries()[i++ % queries().size()], 10, accept_all()));
}

void BM_ExactBatchSerial(benchmark::State& state) {
  const PointSet& p = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    for (const auto& q : queries()) benchmark::DoNotOptimize(reference::query_exact_serial(p, q, 10, accept_all()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries().size()));
}

void BM_ExactBatch(benchmark::State& state) {
  const ExactIndex ex(points(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(ex.query_batch(queries(), 10, accept_all()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries().size()));
}

void BM_GraphBuildSerial(benchmark::State& state) {
  const PointSet& p = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::knn_graph_serial(p, kDefaultDegree));
}

void BM_GraphBuild(benchmark::State& state) {
  const PointSet& p = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(p));
}

void BM_GraphQuery(benchmark::State& state) {
  static const GraphIndex g = build_graph(points(20000));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(query_graph(g, queries()[i++ % queries().size()], 10, SearchParams{}, accept_all()));
  }
}

std::vector<double> column_mean(const PointSet& p) {
  std::vector<double> mean(p.dim(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.dim(); ++j) mean[j] += p.row(i)[j];
  }
  for (auto& m : mean) m /= static_cast<double>(p.size());
  return mean;
}

void BM_CovarianceSerial(benchmark::State& state) {
  const PointSet& p = points(static_cast<std::size_t>(state.range(0)));
  const auto mean = column_mean(p);
  for (auto _ : state) benchmark::DoNotOptimize(reference::covariance_serial(p, mean));
}

void BM_Covariance(benchmark::State& state) {
  const PointSet& p = points(static_cast<std::size_t>(state.range(0)));
  const auto mean = column_mean(p);
  for (auto _ : state) benchmark::DoNotOptimize(covariance(p, mean));
}

}  // namespace

BENCHMARK(BM_ExactQuerySerial)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExactQuery)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExactBatchSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactBatch)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GraphBuildSerial)->Arg(3000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GraphBuild)->Arg(3000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GraphQuery)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CovarianceSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Covariance)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
