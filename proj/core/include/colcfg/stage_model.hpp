#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colcfg/models.hpp"
#include "colcfg/stage_graph.hpp"
#include "colcfg/types.hpp"

namespace colcfg {

// per_stage: one model per stage. global: a single model over all stages that
// sees the stage descriptor (a Kronecker-expanded basis for NNLS, context
// tokens for the neural model).
enum class ModelScope { per_stage, global };

std::string_view to_string(ModelScope scope);
ModelScope parse_model_scope(std::string_view text);

struct StageModelOptions {
  ModelScope scope = ModelScope::per_stage;
  ModelKind kind = ModelKind::parametric_nnls;  // or neural
  double recency_weight = 2.0;
  int online_fine_tune_epochs = 50;
  NeuralOptions neural;
  NnlsOptions nnls;
};

struct StageModel {
  StageModelOptions options;
  StageGraph graph;
  double data_gb = 0.0;
  std::string machine;

  // Training set and its row weights, kept for online refits.
  std::vector<StageRun> history;
  std::vector<double> weights;

  std::map<std::string, TrainedModel> per_stage;
  std::vector<std::string> descriptor_keys;  // global parametric basis
  std::vector<double> global_theta;
  std::optional<TrainedModel> global_neural;

  double predict(std::string_view stage_id, int scale_out) const;

  // Critical path of predicted stage runtimes for one iteration.
  double predict_iteration(int scale_out, int iteration = 1) const;
};

// Stage run as an execution record: algorithm = stage id, params = stage
// descriptor, dataset = data_gb.
ExecutionRecord stage_record(const StageGraph& graph, const StageRun& run, double data_gb, const std::string& machine);

// Kronecker basis (1, descriptor...) x (1, d/s, log2 s, s).
std::vector<double> global_basis(const StageSpec& stage, std::span<const std::string> descriptor_keys, int scale_out,
                                 double data_gb);

StageModel fit_stage_model(const StageGraph& graph, double data_gb, std::string machine, std::span<const StageRun> runs,
                           const StageModelOptions& options = {}, std::span<const double> weights = {});

// Adds `new_runs` with the recency weight (earlier rows drop back to 1).
// NNLS models refit; neural models fine-tune their head for
// online_fine_tune_epochs on the union. Throws on an empty run list.
StageModel update_model_online(const StageModel& model, std::span<const StageRun> new_runs);

// runtime_s > threshold * predicted runtime for that stage and scale-out.
std::vector<bool> detect_anomaly(std::span<const StageRun> runs, const StageModel& model, double threshold = 2.0);

}  // namespace colcfg
