#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "colcfg/errors.hpp"
#include "colcfg/overhead.hpp"
#include "colcfg/sim_io.hpp"
#include "colcfg/simulator.hpp"
#include "colcfg/stage_model.hpp"
#include "colcfg/synth.hpp"

using namespace colcfg;

namespace {

// a (first iteration only) -> {b, c} -> d
SimulationSpec diamond(int iterations) {
  SimulationSpec spec;
  spec.graph.stages = {{"a", {{"io", 1.0}}, false}, {"b", {{"cpu", 1.0}}, true}, {"c", {{"cpu", 0.5}}, true},
                       {"d", {{"net", 1.0}}, true}};
  spec.graph.edges = {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}};
  spec.graph.iterations = iterations;
  spec.truth.data_gb = 10.0;
  spec.truth.stages = {{"a", {5.0, 20.0, 0.0}}, {"b", {2.0, 30.0, 1.0}}, {"c", {1.0, 40.0, 0.0}}, {"d", {3.0, 5.0, 0.5}}};
  spec.initial_scale_out = 8;
  return spec;
}

Controller static_controller() {
  Controller c;
  c.kind = ControllerKind::static_config;
  return c;
}

SimulationSpec quiet_spec(std::uint64_t seed) {
  SimSpecOptions o;
  o.noise_sigma = 0.0;
  o.anomaly_rate = 0.0;
  return generate_sim_spec(o, seed);
}

StageModel profiled_model(const SimulationSpec& spec, std::uint64_t seed = 1) {
  return fit_stage_model(spec.graph, spec.truth.data_gb, spec.machine, profiling_runs(spec, 1, seed));
}

// Documented decision rule, re-implemented as a scan over every candidate.
int oracle_decision(const SimState& state, const StageModel& model, const OverheadModel& overhead,
                    const RuntimeTarget& target, const ScaleOutRange& bounds, double margin) {
  const double budget = target.target_s - state.elapsed_s;
  const double limit = std::isinf(budget) ? budget : budget - margin * std::max(budget, 0.0);
  const auto values = bounds.values();
  std::set<int> candidates(values.begin(), values.end());
  candidates.insert(state.scale_out);
  auto remaining = [&](int s) {
    return model.predict_iteration(s) * state.remaining_iterations + (s == state.scale_out ? 0.0 : overhead(state.scale_out, s));
  };
  if (remaining(state.scale_out) <= limit) return state.scale_out;
  for (int s : candidates) {
    if (remaining(s) <= limit) return s;
  }
  int best = state.scale_out;
  for (int s : candidates) {
    if (remaining(s) < remaining(best)) best = s;
  }
  return best;
}

}  // namespace

TEST_SUITE("dynamic") {
  TEST_CASE("stage graph validation and ordering") {
    auto spec = diamond(3);
    CHECK_NOTHROW(spec.graph.validate());
    const auto order = spec.graph.topological_order();
    CHECK(order == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(spec.graph.active_in(0) == std::vector<bool>{true, true, true, true});
    CHECK(spec.graph.active_in(1) == std::vector<bool>{false, true, true, true});

    auto cyclic = spec.graph;
    cyclic.edges.emplace_back("d", "a");
    CHECK_THROWS_AS(cyclic.validate(), ValidationError);
    auto self = spec.graph;
    self.edges.emplace_back("b", "b");
    CHECK_THROWS_AS(self.validate(), ValidationError);
    auto dup = spec.graph;
    dup.stages.push_back(dup.stages.front());
    CHECK_THROWS_AS(dup.validate(), ValidationError);
    auto dangling = spec.graph;
    dangling.edges.emplace_back("a", "zz");
    CHECK_THROWS_AS(dangling.validate(), ValidationError);
    CHECK_THROWS_AS(StageGraph{}.validate(), ValidationError);
  }

  TEST_CASE("ground truth validation") {
    auto spec = diamond(3);
    spec.truth.anomalies = {{1, "b", 0.5}};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = diamond(3);
    spec.truth.noise_sigma = -0.1;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = diamond(3);
    spec.truth.stages.erase("c");
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = diamond(3);
    spec.initial_scale_out = 100;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }

  TEST_CASE("static zero-noise run equals the closed-form sum") {
    const auto spec = diamond(4);
    auto f = [](double base, double work, double lg, int s) { return base + work * 10.0 / s + lg * std::log2(double(s)); };
    const double a = f(5, 20, 0, 8), b = f(2, 30, 1, 8), c = f(1, 40, 0, 8), d = f(3, 5, 0.5, 8);
    const double expected = (a + std::max(b, c) + d) + 3 * (std::max(b, c) + d);
    const auto result = simulate(spec, static_controller(), 7);
    CHECK(result.final_state.elapsed_s == doctest::Approx(expected).epsilon(1e-12));
    CHECK(result.trace.size() == 4 + 3 * 3);
    CHECK(result.final_state.rescales.empty());
    CHECK(result.final_state.remaining_iterations == 0);
  }

  TEST_CASE("zero iterations give an empty trace") {
    const auto result = simulate(diamond(0), static_controller(), 1);
    CHECK(result.trace.empty());
    CHECK(result.final_state.elapsed_s == 0.0);
    const auto dynamic = simulate(diamond(0), Controller{}, 1);
    CHECK(dynamic.trace.empty());
  }

  TEST_CASE("traces are deterministic per seed") {
    const auto spec = generate_sim_spec({}, 3);
    const std::vector<SimResult> a{simulate(spec, Controller{}, 11)};
    const std::vector<SimResult> b{simulate(spec, Controller{}, 11)};
    const std::vector<SimResult> c{simulate(spec, Controller{}, 12)};
    CHECK(trace_csv(a) == trace_csv(b));
    CHECK(trace_csv(a) != trace_csv(c));
  }

  TEST_CASE("bounds, barriers and elapsed-time accounting hold on seeded runs") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      const auto spec = generate_sim_spec({}, seed);
      const auto allowed = spec.bounds.values();
      for (auto kind : {ControllerKind::static_config, ControllerKind::dynamic}) {
        Controller controller;
        controller.kind = kind;
        const auto result = simulate(spec, controller, seed);

        std::map<int, std::map<std::string, double>> by_iteration;
        std::map<int, int> scale_of_iteration;
        double last_end = 0.0;
        for (const auto& e : result.trace) {
          CHECK(std::find(allowed.begin(), allowed.end(), e.run.scale_out) != allowed.end());
          auto [it, fresh] = scale_of_iteration.emplace(e.run.iteration, e.run.scale_out);
          CHECK(it->second == e.run.scale_out);  // no mid-iteration change
          by_iteration[e.run.iteration][e.run.stage_id] = e.run.runtime_s;
          CHECK(e.end_s >= e.start_s);
          last_end = std::max(last_end, e.end_s);
        }
        double expected = 0.0;
        for (const auto& [iteration, runtimes] : by_iteration) {
          std::vector<double> durations;
          for (const auto& stage : spec.graph.stages) {
            const auto hit = runtimes.find(stage.stage_id);
            durations.push_back(hit == runtimes.end() ? 0.0 : hit->second);
          }
          expected += critical_path(spec.graph, durations, spec.graph.active_in(iteration));
        }
        for (const auto& r : result.final_state.rescales) {
          expected += r.overhead_s;
          CHECK(r.iteration >= 0);
          CHECK(r.iteration < spec.graph.iterations - 1);
          CHECK(scale_of_iteration.at(r.iteration) == r.from);
          CHECK(scale_of_iteration.at(r.iteration + 1) == r.to);
        }
        CHECK(result.final_state.elapsed_s == doctest::Approx(expected).epsilon(1e-9));
        CHECK(result.final_state.elapsed_s == doctest::Approx(last_end).epsilon(1e-12));
        if (kind == ControllerKind::static_config) CHECK(result.final_state.rescales.empty());
      }
    }
  }

  TEST_CASE("overhead model") {
    const auto prior = learn_overhead({});
    CHECK(prior.from_prior);
    CHECK(prior(8, 16) == doctest::Approx(46.0));
    CHECK(prior(16, 8) == doctest::Approx(46.0));
    CHECK(prior(12, 12) == 0.0);

    std::vector<OverheadObservation> two{{4, 8, 14.0}, {8, 12, 14.0}};
    CHECK(learn_overhead(two).from_prior);

    std::vector<OverheadObservation> history;
    for (auto [from, to] : std::vector<std::pair<int, int>>{{4, 8}, {8, 20}, {20, 12}, {12, 36}, {36, 4}}) {
      history.push_back({from, to, 10.0 + 1.0 * std::abs(to - from)});
    }
    const auto learned = learn_overhead(history);
    CHECK_FALSE(learned.from_prior);
    CHECK(std::abs(learned.alpha - 10.0) < 1e-6);
    CHECK(std::abs(learned.beta - 1.0) < 1e-6);

    std::vector<OverheadObservation> bad{{4, 8, -1.0}, {8, 12, 3.0}, {12, 4, 3.0}};
    CHECK_THROWS_AS(learn_overhead(bad), ValidationError);
  }

  TEST_CASE("an unbounded target always keeps the current scale-out") {
    const auto spec = quiet_spec(4);
    const auto model = profiled_model(spec);
    const RuntimeTarget target{std::numeric_limits<double>::infinity(), false};
    for (int s : spec.bounds.values()) {
      SimState state;
      state.scale_out = s;
      state.remaining_iterations = 10;
      state.elapsed_s = 1e6;
      const auto d = rescale_decision(state, model, OverheadModel{}, target, spec.bounds);
      CHECK(d.keep);
      CHECK(d.scale_out == s);
    }
  }

  TEST_CASE("an impossible budget falls back to the least predicted remaining time") {
    const auto spec = quiet_spec(4);
    const auto model = profiled_model(spec);
    SimState state;
    state.scale_out = 8;
    state.remaining_iterations = 10;
    state.elapsed_s = 5000.0;
    const RuntimeTarget target{100.0, false};
    const auto d = rescale_decision(state, model, OverheadModel{}, target, spec.bounds);
    CHECK(d.scale_out == oracle_decision(state, model, OverheadModel{}, target, spec.bounds, 0.10));
    double best = std::numeric_limits<double>::infinity();
    for (int s : spec.bounds.values()) {
      best = std::min(best, model.predict_iteration(s) * 10 + (s == 8 ? 0.0 : OverheadModel{}(8, s)));
    }
    CHECK(d.predicted_remaining_s == doctest::Approx(best));
  }

  TEST_CASE("a mid-job slowdown raises the scale-out, matching a full candidate scan") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto spec = quiet_spec(seed);
      const auto model = profiled_model(spec);
      const int iterations = spec.graph.iterations;
      const double per_iteration = model.predict_iteration(8);
      // On plan: half the job done at the predicted pace leaves room at s = 8.
      SimState state;
      state.scale_out = 8;
      state.remaining_iterations = iterations / 2;
      state.elapsed_s = per_iteration * (iterations - state.remaining_iterations) + model.predict(spec.graph.stages[0].stage_id, 8);
      const RuntimeTarget target{state.elapsed_s + 1.3 * per_iteration * state.remaining_iterations, false};
      auto on_plan = rescale_decision(state, model, OverheadModel{}, target, spec.bounds);
      CHECK(on_plan.keep);

      // A 3x slowdown over the last two iterations eats into the budget.
      state.elapsed_s += 2.0 * 2.0 * per_iteration;
      const auto d = rescale_decision(state, model, OverheadModel{}, target, spec.bounds);
      CHECK(d.scale_out == oracle_decision(state, model, OverheadModel{}, target, spec.bounds, 0.10));
      CHECK(d.scale_out > 8);
      CHECK_FALSE(d.keep);
    }
  }

  TEST_CASE("online updates") {
    const auto spec = quiet_spec(6);
    const auto runs = profiling_runs(spec, 1, 2);
    const auto model = fit_stage_model(spec.graph, spec.truth.data_gb, spec.machine, runs);

    const std::vector<StageRun> duplicate{runs[3]};
    const auto same = update_model_online(model, duplicate);
    for (const auto& stage : spec.graph.stages) {
      for (int s : spec.bounds.values()) {
        const double before = model.predict(stage.stage_id, s);
        CHECK(std::abs(same.predict(stage.stage_id, s) - before) / before < 0.01);
      }
    }

    std::vector<StageRun> slow;
    for (const auto& stage : spec.graph.stages) {
      if (!stage.per_iteration) continue;
      for (int rep = 0; rep < 3; ++rep) {
        slow.push_back({stage.stage_id, 5 + rep, 8, 3.0 * spec.truth.expected_runtime(stage.stage_id, 8), {}, false});
      }
    }
    const auto slower = update_model_online(model, slow);
    CHECK(slower.predict_iteration(8) > model.predict_iteration(8));

    CHECK_THROWS_AS(update_model_online(model, std::span<const StageRun>{}), ValidationError);
  }

  TEST_CASE("global scope models predict every stage") {
    const auto spec = quiet_spec(6);
    StageModelOptions o;
    o.scope = ModelScope::global;
    const auto model = fit_stage_model(spec.graph, spec.truth.data_gb, spec.machine, profiling_runs(spec, 2, 3), o);
    for (const auto& stage : spec.graph.stages) {
      for (int s : spec.bounds.values()) {
        const double truth = spec.truth.expected_runtime(stage.stage_id, s);
        CHECK(std::abs(model.predict(stage.stage_id, s) - truth) / truth < 0.05);
      }
    }
  }

  TEST_CASE("anomaly flags") {
    const auto spec = quiet_spec(2);
    const auto model = profiled_model(spec);
    const auto& id = spec.graph.stages[1].stage_id;
    const double predicted = model.predict(id, 12);
    const std::vector<StageRun> runs{{id, 1, 12, predicted, {}, false},
                                     {id, 2, 12, 3.0 * predicted, {}, true},
                                     {id, 3, 12, 2.0 * predicted, {}, false}};
    CHECK(detect_anomaly(runs, model) == std::vector<bool>{false, true, false});
    CHECK(detect_anomaly(runs, model, 1.5) == std::vector<bool>{false, true, true});
  }

  TEST_CASE("planted anomalies are flagged during a dynamic run") {
    SimSpecOptions o;
    o.anomaly_rate = 0.0;
    auto spec = generate_sim_spec(o, 21);
    spec.truth.anomalies = {{4, "map", 3.0}, {9, "reduce", 3.5}, {13, "shuffle", 4.0}};
    const auto result = simulate(spec, Controller{}, 5);
    std::size_t flagged = 0;
    for (const auto& e : result.trace) {
      CHECK(e.flagged == e.run.anomalous);
      flagged += e.flagged ? 1 : 0;
    }
    CHECK(flagged == 3);
  }

  TEST_CASE("sim spec JSON round trip and trace CSV") {
    auto spec = generate_sim_spec({}, 9);
    spec.truth.anomalies = {{2, "map", 2.5}};
    const auto back = sim_spec_from_json(sim_spec_to_json(spec));
    CHECK(back == spec);
    CHECK(sim_spec_to_json(back) == sim_spec_to_json(spec));
    CHECK_THROWS_AS(sim_spec_from_json("{}"), ValidationError);
    CHECK_THROWS_AS(sim_spec_from_json("not json"), ValidationError);

    const std::vector<SimResult> results{simulate(spec, static_controller(), 1), simulate(spec, Controller{}, 1)};
    const auto csv = trace_csv(results);
    CHECK(csv.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
    const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == 1 + results[0].trace.size() + results[1].trace.size());
    CHECK(csv.find("\n1,") != std::string::npos);
  }
}
