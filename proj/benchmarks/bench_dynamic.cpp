#include <benchmark/benchmark.h>

#include "colcfg/simulator.hpp"
#include "colcfg/synth.hpp"

namespace {

using namespace colcfg;

void BM_SimulateStatic(benchmark::State& state) {
  const auto spec = generate_sim_spec({}, 1);
  Controller controller;
  controller.kind = ControllerKind::static_config;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, controller, ++seed));
}
BENCHMARK(BM_SimulateStatic)->Unit(benchmark::kMicrosecond);

void BM_SimulateDynamic(benchmark::State& state) {
  SimSpecOptions options;
  options.iterations = static_cast<int>(state.range(0));
  const auto spec = generate_sim_spec(options, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, Controller{}, ++seed));
}
BENCHMARK(BM_SimulateDynamic)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
