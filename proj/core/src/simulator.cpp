#include "colcfg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <tuple>

#include "colcfg/errors.hpp"

namespace colcfg {

double StageTruth::runtime(int scale_out, double data_gb) const {
  const double s = scale_out;
  return base_s + work_s * data_gb / s + log_coef * std::log2(s);
}

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Independent stream per (seed, tag, a, b) so draws do not depend on the
// order in which the controller consumes them.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::uint32_t tag, std::int64_t a, std::int64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag,
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double lognormal(double sigma) { return sigma > 0.0 ? std::exp(sigma * normal()) : 1.0; }

 private:
  std::mt19937_64 engine_;
};

enum Tag : std::uint32_t { kNoise = 1, kAnomaly = 2, kOverhead = 3, kProfile = 4 };

}  // namespace

void GroundTruthSpec::validate(const StageGraph& graph) const {
  graph.validate();
  if (!(data_gb > 0.0) || !std::isfinite(data_gb)) throw ValidationError("ground truth data_gb must be > 0");
  if (!finite_nonneg(noise_sigma)) throw ValidationError("noise sigma must be >= 0");
  for (const auto& stage : graph.stages) {
    auto it = stages.find(stage.stage_id);
    if (it == stages.end()) throw ValidationError("no ground truth for stage '" + stage.stage_id + "'");
    const auto& t = it->second;
    if (!(t.base_s > 0.0) || !std::isfinite(t.base_s) || !finite_nonneg(t.work_s) || !finite_nonneg(t.log_coef)) {
      throw ValidationError("stage '" + stage.stage_id + "': need base_s > 0 and work_s, log_coef >= 0");
    }
  }
  for (const auto& [id, truth] : stages) {
    if (!graph.index_of(id)) throw ValidationError("ground truth for unknown stage '" + id + "'");
  }
  for (const auto& a : anomalies) {
    if (!graph.index_of(a.stage_id)) throw ValidationError("anomaly on unknown stage '" + a.stage_id + "'");
    if (a.iteration < 0) throw ValidationError("anomaly iteration must be >= 0");
    if (!(a.factor >= 1.0) || !std::isfinite(a.factor)) throw ValidationError("slowdown factor must be >= 1");
  }
  if (random_anomalies) {
    const auto& r = *random_anomalies;
    if (!(r.rate >= 0.0 && r.rate <= 1.0)) throw ValidationError("anomaly rate must be in [0, 1]");
    if (!(r.min_factor >= 1.0) || !(r.max_factor >= r.min_factor) || !std::isfinite(r.max_factor)) {
      throw ValidationError("random anomaly factors must satisfy 1 <= min <= max");
    }
  }
  if (!std::isfinite(overhead.alpha) || !std::isfinite(overhead.beta) || !finite_nonneg(overhead.sigma)) {
    throw ValidationError("overhead truth must be finite with sigma >= 0");
  }
}

double GroundTruthSpec::expected_runtime(std::string_view stage_id, int scale_out) const {
  auto it = stages.find(std::string(stage_id));
  if (it == stages.end()) throw ValidationError("no ground truth for stage '" + std::string(stage_id) + "'");
  return it->second.runtime(scale_out, data_gb);
}

void SimulationSpec::validate() const {
  truth.validate(graph);
  if (!(target.target_s > 0.0)) throw ValidationError("runtime target must be > 0");
  bounds.values();  // throws on a malformed range
  if (initial_scale_out < bounds.lo || initial_scale_out > bounds.hi) {
    throw ValidationError("initial scale-out " + std::to_string(initial_scale_out) + " outside bounds");
  }
}

std::string_view to_string(ControllerKind kind) { return kind == ControllerKind::dynamic ? "dynamic" : "static"; }

ControllerKind parse_controller_kind(std::string_view text) {
  if (text == "dynamic") return ControllerKind::dynamic;
  if (text == "static") return ControllerKind::static_config;
  throw ValidationError("unknown controller '" + std::string(text) + "'");
}

RescaleDecision rescale_decision(const SimState& state, const StageModel& model, const OverheadModel& overhead,
                                 const RuntimeTarget& target, const ScaleOutRange& bounds, double safety_margin,
                                 bool scale_down) {
  RescaleDecision decision;
  decision.scale_out = state.scale_out;
  decision.budget_s = target.target_s - state.elapsed_s;
  if (state.remaining_iterations <= 0) return decision;

  auto candidates = bounds.values();
  if (std::find(candidates.begin(), candidates.end(), state.scale_out) == candidates.end()) {
    candidates.push_back(state.scale_out);
    std::sort(candidates.begin(), candidates.end());
  }
  const double budget = decision.budget_s;
  const double limit = std::isinf(budget) ? budget : budget - safety_margin * std::max(budget, 0.0);

  auto remaining_at = [&](int s) {
    return model.predict_iteration(s) * state.remaining_iterations + overhead(state.scale_out, s);
  };
  std::vector<double> remaining;
  remaining.reserve(candidates.size());
  for (int s : candidates) remaining.push_back(remaining_at(s));

  const auto current =
      static_cast<std::size_t>(std::find(candidates.begin(), candidates.end(), state.scale_out) - candidates.begin());
  std::size_t pick = current;
  if (scale_down || !(remaining[current] <= limit)) {
    auto fits = std::find_if(remaining.begin(), remaining.end(), [&](double r) { return r <= limit; });
    if (fits != remaining.end()) {
      pick = static_cast<std::size_t>(fits - remaining.begin());
    } else {
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (remaining[i] < remaining[pick]) pick = i;
      }
    }
  }
  decision.scale_out = candidates[pick];
  decision.keep = pick == current;
  decision.predicted_remaining_s = remaining[pick];
  return decision;
}

std::vector<StageRun> profiling_runs(const SimulationSpec& spec, int repetitions, std::uint64_t seed) {
  spec.validate();
  if (repetitions < 1) throw ValidationError("profiling repetitions must be >= 1");
  std::vector<StageRun> runs;
  for (int rep = 0; rep < repetitions; ++rep) {
    for (int s : spec.bounds.values()) {
      for (std::size_t v = 0; v < spec.graph.stages.size(); ++v) {
        const auto& stage = spec.graph.stages[v];
        KeyedRng rng(seed, kProfile, rep * 100003LL + s, static_cast<std::int64_t>(v));
        StageRun run;
        run.stage_id = stage.stage_id;
        run.iteration = rep;
        run.scale_out = s;
        run.runtime_s = spec.truth.expected_runtime(stage.stage_id, s) * rng.lognormal(spec.truth.noise_sigma);
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

namespace {

double anomaly_factor(const SimulationSpec& spec, std::uint64_t seed, int iteration, std::size_t v) {
  double factor = 1.0;
  const auto& id = spec.graph.stages[v].stage_id;
  for (const auto& a : spec.truth.anomalies) {
    if (a.iteration == iteration && a.stage_id == id) factor *= a.factor;
  }
  if (spec.truth.random_anomalies && spec.truth.random_anomalies->rate > 0.0) {
    const auto& r = *spec.truth.random_anomalies;
    KeyedRng rng(seed, kAnomaly, iteration, static_cast<std::int64_t>(v));
    if (rng.uniform() < r.rate) factor *= r.min_factor + (r.max_factor - r.min_factor) * rng.uniform();
  }
  return factor;
}

// Runs one iteration through the event queue; returns its trace entries in
// completion order.
std::vector<TraceEntry> run_iteration(const SimulationSpec& spec, const std::vector<std::vector<std::size_t>>& preds,
                                      int iteration, int scale_out, double start, std::uint64_t seed) {
  const auto& graph = spec.graph;
  const auto n = graph.stages.size();
  const auto active = graph.active_in(iteration);
  std::vector<std::vector<std::size_t>> succs(n);
  std::vector<std::size_t> waiting(n);
  for (std::size_t v = 0; v < n; ++v) {
    waiting[v] = preds[v].size();
    for (auto u : preds[v]) succs[u].push_back(v);
  }

  using Event = std::tuple<double, std::size_t>;  // (finish time, stage)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::vector<TraceEntry> entries(n);
  auto launch = [&](std::size_t v, double at) {
    double duration = 0.0;
    if (active[v]) {
      const auto& stage = graph.stages[v];
      const auto& truth = spec.truth.stages.at(stage.stage_id);
      const double expected = truth.runtime(scale_out, spec.truth.data_gb);
      KeyedRng rng(seed, kNoise, iteration, static_cast<std::int64_t>(v));
      const double factor = anomaly_factor(spec, seed, iteration, v);
      duration = expected * rng.lognormal(spec.truth.noise_sigma) * factor;
      auto& e = entries[v];
      e.run.stage_id = stage.stage_id;
      e.run.iteration = iteration;
      e.run.scale_out = scale_out;
      e.run.runtime_s = duration;
      e.run.anomalous = factor > 1.0;
      const double work = truth.work_s * spec.truth.data_gb / scale_out;
      e.run.metrics["cpu_util"] = std::clamp(work / expected / factor, 0.0, 1.0);
      e.start_s = at;
      e.end_s = at + duration;
    }
    queue.emplace(at + duration, v);
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (waiting[v] == 0) launch(v, start);
  }
  std::vector<TraceEntry> completed;
  while (!queue.empty()) {
    const auto [time, u] = queue.top();
    queue.pop();
    if (active[u]) completed.push_back(entries[u]);
    for (auto v : succs[u]) {
      if (--waiting[v] == 0) launch(v, time);
    }
  }
  return completed;
}

}  // namespace

SimResult simulate(const SimulationSpec& spec, const Controller& controller, std::uint64_t seed,
                   const StageModel* initial_model) {
  spec.validate();
  if (!(controller.safety_margin >= 0.0 && controller.safety_margin < 1.0)) {
    throw ValidationError("safety margin must be in [0, 1)");
  }
  if (controller.evaluation_interval < 1) throw ValidationError("evaluation interval must be >= 1");
  if (!(controller.anomaly_threshold > 0.0)) throw ValidationError("anomaly threshold must be > 0");

  const bool dynamic = controller.kind == ControllerKind::dynamic;
  std::optional<StageModel> model;
  if (dynamic) {
    if (initial_model != nullptr) {
      model = *initial_model;
    } else {
      const auto history = profiling_runs(spec, 1, seed);
      model = fit_stage_model(spec.graph, spec.truth.data_gb, spec.machine, history, controller.model);
    }
  }
  auto observations = controller.overhead_history;
  auto overhead = learn_overhead(observations);

  const auto preds = spec.graph.predecessors();
  SimResult result;
  auto& state = result.final_state;
  state.scale_out = spec.initial_scale_out;
  state.remaining_iterations = spec.graph.iterations;

  std::vector<StageRun> pending;
  int barriers_since_eval = 0;
  for (int it = 0; it < spec.graph.iterations; ++it) {
    auto entries = run_iteration(spec, preds, it, state.scale_out, state.elapsed_s, seed);
    double end = state.elapsed_s;
    for (const auto& e : entries) end = std::max(end, e.end_s);
    state.elapsed_s = end;
    state.remaining_iterations = spec.graph.iterations - it - 1;

    bool any_flag = false;
    if (dynamic) {
      std::vector<StageRun> runs;
      for (const auto& e : entries) runs.push_back(e.run);
      const auto flags = detect_anomaly(runs, *model, controller.anomaly_threshold);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].flagged = flags[i];
        if (flags[i]) {
          any_flag = true;
        } else {
          pending.push_back(entries[i].run);
        }
      }
    }
    for (auto& e : entries) {
      state.completed.push_back(e.run);
      result.trace.push_back(std::move(e));
    }
    if (!dynamic || state.remaining_iterations == 0) continue;

    // Barrier.
    if (++barriers_since_eval < controller.evaluation_interval && !any_flag) continue;
    barriers_since_eval = 0;
    if (!pending.empty()) {
      model = update_model_online(*model, pending);
      pending.clear();
    }
    const auto decision = rescale_decision(state, *model, overhead, spec.target, spec.bounds,
                                           controller.safety_margin, controller.scale_down);
    if (decision.keep) continue;
    const auto& truth = spec.truth.overhead;
    KeyedRng rng(seed, kOverhead, it, 0);
    const double paid = std::max(0.0, truth.alpha + truth.beta * std::abs(decision.scale_out - state.scale_out)) *
                        rng.lognormal(truth.sigma);
    state.rescales.push_back({it, state.elapsed_s, state.scale_out, decision.scale_out, paid});
    observations.push_back({state.scale_out, decision.scale_out, paid});
    overhead = learn_overhead(observations);
    state.elapsed_s += paid;
    state.scale_out = decision.scale_out;
  }
  result.met_target = state.elapsed_s <= spec.target.target_s;
  return result;
}

}  // namespace colcfg
