#include <benchmark/benchmark.h>

#include "colcfg/optimizer.hpp"
#include "colcfg/synth.hpp"

namespace {

using namespace colcfg;

void BM_Recommend(benchmark::State& state) {
  const auto catalog = standard_catalog();
  const ScaleOutRange range{1, static_cast<int>(state.range(0)), 1};
  const auto candidates = enumerate_candidates(catalog, range);
  TrainedModel model;
  model.kind = ModelKind::parametric_nnls;
  model.params = ParametricParams{{20.0, 100.0, 4.0, 0.0}};
  ExecutionContext ctx;
  ctx.job.algorithm = "kmeans";
  ctx.machine = "m5.xlarge";
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        recommend(model, ctx, 20.0, candidates, catalog, RuntimeTarget{200.0, false}, Objective::min_cost));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(candidates.size()));
}
BENCHMARK(BM_Recommend)->Arg(36)->Arg(256);

}  // namespace
