#include <benchmark/benchmark.h>

#include "colcfg/models.hpp"
#include "colcfg/nnls.hpp"
#include "colcfg/similarity.hpp"
#include "colcfg/synth.hpp"

namespace {

using namespace colcfg;

void BM_SolveNnls(benchmark::State& state) {
  const auto rows = state.range(0);
  Eigen::MatrixXd x(rows, 4);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto f = featurize(static_cast<int>(4 + i % 33), 50.0);
    for (int j = 0; j < 4; ++j) x(i, j) = f[static_cast<std::size_t>(j)];
    y(i) = 10.0 + 100.0 * f[1] + 5.0 * f[2];
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_nnls(x, y));
}
BENCHMARK(BM_SolveNnls)->Arg(20)->Arg(200)->Arg(2000);

void BM_ContextSimilarity(benchmark::State& state) {
  const auto pop = generate_two_population({}, 1);
  for (auto _ : state) {
    for (const auto& r : pop.global) {
      benchmark::DoNotOptimize(context_similarity(r.context, pop.query, SimilarityWeights{}, pop.catalog));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pop.global.size()));
}
BENCHMARK(BM_ContextSimilarity);

void BM_FitSimilarityWeighted(benchmark::State& state) {
  const auto pop = generate_two_population({}, 2);
  std::vector<ExecutionRecord> pooled = pop.global;
  pooled.insert(pooled.end(), pop.local.begin(), pop.local.end());
  for (auto _ : state) benchmark::DoNotOptimize(fit_similarity_weighted(pooled, pop.query, pop.catalog));
}
BENCHMARK(BM_FitSimilarityWeighted)->Unit(benchmark::kMillisecond);

void BM_FineTuneNeural(benchmark::State& state) {
  const auto pop = generate_two_population({}, 3);
  const auto pretrained = fit_neural(pop.global, nullptr, TrainingMode::pretrain);
  const std::vector<ExecutionRecord> five(pop.local.begin(), pop.local.begin() + 5);
  for (auto _ : state) benchmark::DoNotOptimize(fit_neural(five, &pretrained, TrainingMode::fine_tune));
}
BENCHMARK(BM_FineTuneNeural)->Unit(benchmark::kMillisecond);

}  // namespace
