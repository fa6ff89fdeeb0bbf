#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colcfg/optimizer.hpp"
#include "colcfg/overhead.hpp"
#include "colcfg/stage_graph.hpp"
#include "colcfg/stage_model.hpp"
#include "colcfg/types.hpp"

namespace colcfg {

// runtime(s) = base_s + work_s * data_gb / s + log_coef * log2(s)
struct StageTruth {
  double base_s = 1.0;
  double work_s = 0.0;
  double log_coef = 0.0;

  double runtime(int scale_out, double data_gb) const;
  bool operator==(const StageTruth&) const = default;
};

struct AnomalyEvent {
  int iteration = 0;
  std::string stage_id;
  double factor = 3.0;  // slowdown, >= 1

  bool operator==(const AnomalyEvent&) const = default;
};

// Each (iteration, stage) run is slowed with probability `rate` by a factor
// drawn uniformly from [min_factor, max_factor].
struct RandomAnomalies {
  double rate = 0.0;
  double min_factor = 2.5;
  double max_factor = 4.0;

  bool operator==(const RandomAnomalies&) const = default;
};

// Rescale cost actually paid: max(0, alpha + beta * |delta|) times lognormal(sigma).
struct OverheadTruth {
  double alpha = 20.0;
  double beta = 1.5;
  double sigma = 0.0;

  bool operator==(const OverheadTruth&) const = default;
};

struct GroundTruthSpec {
  std::map<std::string, StageTruth> stages;
  double data_gb = 10.0;
  double noise_sigma = 0.0;  // multiplicative lognormal
  std::vector<AnomalyEvent> anomalies;
  std::optional<RandomAnomalies> random_anomalies;
  OverheadTruth overhead;

  void validate(const StageGraph& graph) const;
  double expected_runtime(std::string_view stage_id, int scale_out) const;

  bool operator==(const GroundTruthSpec&) const = default;
};

struct SimulationSpec {
  StageGraph graph;
  GroundTruthSpec truth;
  RuntimeTarget target{600.0, false};
  ScaleOutRange bounds;
  int initial_scale_out = 8;
  std::string machine = "sim";

  void validate() const;
  bool operator==(const SimulationSpec&) const = default;
};

enum class ControllerKind { static_config, dynamic };

std::string_view to_string(ControllerKind kind);
ControllerKind parse_controller_kind(std::string_view text);

struct Controller {
  ControllerKind kind = ControllerKind::dynamic;
  StageModelOptions model;
  double safety_margin = 0.10;  // fraction of the remaining budget
  double anomaly_threshold = 2.0;
  int evaluation_interval = 1;  // barriers between regular re-assessments
  bool scale_down = false;      // allow moving to a smaller fitting scale-out
  std::vector<OverheadObservation> overhead_history;
};

struct RescaleEvent {
  int iteration = 0;  // barrier after this iteration
  double at_s = 0.0;
  int from = 0;
  int to = 0;
  double overhead_s = 0.0;
};

struct SimState {
  double elapsed_s = 0.0;
  std::vector<StageRun> completed;
  int scale_out = 0;
  int remaining_iterations = 0;
  std::vector<RescaleEvent> rescales;
};

struct RescaleDecision {
  bool keep = true;
  int scale_out = 0;
  double budget_s = 0.0;
  double predicted_remaining_s = 0.0;
};

// Predicted remaining time at s = per-iteration prediction * remaining
// iterations + overhead(current -> s). Keeps the current scale-out when it
// fits within budget minus margin; otherwise the smallest fitting s; if
// nothing fits, the s with the least predicted remaining time (current wins
// ties). With scale_down the smallest fitting s wins even over current.
RescaleDecision rescale_decision(const SimState& state, const StageModel& model, const OverheadModel& overhead,
                                 const RuntimeTarget& target, const ScaleOutRange& bounds,
                                 double safety_margin = 0.10, bool scale_down = false);

struct TraceEntry {
  StageRun run;
  double start_s = 0.0;
  double end_s = 0.0;
  bool flagged = false;  // controller's anomaly verdict
};

struct SimResult {
  std::vector<TraceEntry> trace;
  SimState final_state;
  bool met_target = false;
};

// Noise-carrying, anomaly-free runs of one iteration's stages at every
// scale-out in `bounds`, `repetitions` times each.
std::vector<StageRun> profiling_runs(const SimulationSpec& spec, int repetitions, std::uint64_t seed);

// Single-threaded event loop. Stage runtimes come from the ground truth at
// the current scale-out times noise and anomaly factors; the controller acts
// only at iteration barriers. Random draws are keyed by (seed, iteration,
// stage), so controllers see the same noise. A dynamic controller without
// `initial_model` fits one on profiling_runs(spec, 1, seed).
SimResult simulate(const SimulationSpec& spec, const Controller& controller, std::uint64_t seed,
                   const StageModel* initial_model = nullptr);

}  // namespace colcfg
