#include "colcfg/stage_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "colcfg/errors.hpp"
#include "colcfg/features.hpp"

namespace colcfg {

std::string_view to_string(ModelScope scope) { return scope == ModelScope::per_stage ? "per_stage" : "global"; }

ModelScope parse_model_scope(std::string_view text) {
  if (text == "per_stage") return ModelScope::per_stage;
  if (text == "global") return ModelScope::global;
  throw ValidationError("unknown model scope '" + std::string(text) + "'");
}

namespace {

const StageSpec& stage_of(const StageGraph& graph, std::string_view stage_id) {
  const auto index = graph.index_of(stage_id);
  if (!index) throw ValidationError("unknown stage '" + std::string(stage_id) + "'");
  return graph.stages[*index];
}

std::vector<ExecutionRecord> to_records(const StageModel& model, std::span<const StageRun> runs) {
  std::vector<ExecutionRecord> out;
  out.reserve(runs.size());
  for (const auto& run : runs) out.push_back(stage_record(model.graph, run, model.data_gb, model.machine));
  return out;
}

TrainedModel fit_neural_rows(const std::vector<ExecutionRecord>& records, const NeuralOptions& options) {
  const auto mode = records.size() >= kMinRecordsPretrain ? TrainingMode::pretrain : TrainingMode::scratch;
  return fit_neural(records, nullptr, mode, options);
}

void fit_all(StageModel& model) {
  const auto& opts = model.options;
  if (opts.kind != ModelKind::parametric_nnls && opts.kind != ModelKind::neural) {
    throw ValidationError("stage models support parametric or neural kinds only");
  }
  model.per_stage.clear();
  model.global_theta.clear();
  model.global_neural.reset();

  if (opts.scope == ModelScope::per_stage) {
    std::map<std::string, std::vector<std::size_t>> rows;
    for (std::size_t i = 0; i < model.history.size(); ++i) rows[model.history[i].stage_id].push_back(i);
    for (const auto& stage : model.graph.stages) {
      auto it = rows.find(stage.stage_id);
      if (it == rows.end()) throw UndertrainedError("stage '" + stage.stage_id + "' has no training runs");
      std::vector<StageRun> runs;
      std::vector<double> w;
      for (auto i : it->second) {
        runs.push_back(model.history[i]);
        w.push_back(model.weights[i]);
      }
      const auto records = to_records(model, runs);
      model.per_stage.emplace(stage.stage_id, opts.kind == ModelKind::neural
                                                  ? fit_neural_rows(records, opts.neural)
                                                  : fit_parametric_nnls(records, w, opts.nnls));
    }
    return;
  }

  if (opts.kind == ModelKind::neural) {
    model.global_neural = fit_neural_rows(to_records(model, model.history), opts.neural);
    return;
  }

  std::set<std::string> keys;
  for (const auto& stage : model.graph.stages) {
    for (const auto& [key, value] : stage.features) keys.insert(key);
  }
  model.descriptor_keys.assign(keys.begin(), keys.end());
  const auto cols = static_cast<Eigen::Index>((model.descriptor_keys.size() + 1) * kScaleOutFeatureCount);
  const auto n = static_cast<Eigen::Index>(model.history.size());
  if (n < 4) throw UndertrainedError("global stage model needs at least 4 runs");
  Eigen::MatrixXd design(n, cols);
  Eigen::VectorXd y(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& run = model.history[static_cast<std::size_t>(i)];
    const auto row = global_basis(stage_of(model.graph, run.stage_id), model.descriptor_keys, run.scale_out,
                                  model.data_gb);
    design.row(i) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), cols);
    y(i) = run.runtime_s;
    w(i) = model.weights[static_cast<std::size_t>(i)];
  }
  const auto solution = solve_weighted_nnls(design, y, w, opts.nnls);
  model.global_theta.assign(solution.coefficients.data(), solution.coefficients.data() + cols);
}

}  // namespace

ExecutionRecord stage_record(const StageGraph& graph, const StageRun& run, double data_gb, const std::string& machine) {
  const auto& stage = stage_of(graph, run.stage_id);
  ExecutionRecord record;
  record.context.job.algorithm = stage.stage_id;
  for (const auto& [key, value] : stage.features) record.context.job.params.emplace(key, value);
  record.context.dataset.size_bytes = static_cast<std::uint64_t>(std::llround(data_gb * 1e9));
  record.context.machine = machine;
  record.context.origin = "simulation";
  record.scale_out = run.scale_out;
  record.runtime_s = run.runtime_s;
  return record;
}

std::vector<double> global_basis(const StageSpec& stage, std::span<const std::string> descriptor_keys, int scale_out,
                                 double data_gb) {
  std::vector<double> descriptor{1.0};
  for (const auto& key : descriptor_keys) {
    auto it = stage.features.find(key);
    descriptor.push_back(it == stage.features.end() ? 0.0 : it->second);
  }
  const auto x = featurize(scale_out, data_gb);
  std::vector<double> out;
  out.reserve(descriptor.size() * x.size());
  for (double d : descriptor) {
    for (double f : x) out.push_back(d * f);
  }
  return out;
}

double StageModel::predict(std::string_view stage_id, int scale_out) const {
  if (scale_out < 1) throw ValidationError("scale_out must be >= 1");
  const auto& stage = stage_of(graph, stage_id);
  const CandidateConfig candidate{machine, scale_out};
  if (options.scope == ModelScope::per_stage) {
    auto it = per_stage.find(stage.stage_id);
    if (it == per_stage.end()) throw UndertrainedError("no model for stage '" + stage.stage_id + "'");
    const auto record = stage_record(graph, StageRun{stage.stage_id, 0, scale_out, 1.0, {}, false}, data_gb, machine);
    return predict_runtime(it->second, record.context, candidate, data_gb);
  }
  if (global_neural) {
    const auto record = stage_record(graph, StageRun{stage.stage_id, 0, scale_out, 1.0, {}, false}, data_gb, machine);
    return predict_runtime(*global_neural, record.context, candidate, data_gb);
  }
  if (global_theta.empty()) throw UndertrainedError("stage model is not trained");
  const auto row = global_basis(stage, descriptor_keys, scale_out, data_gb);
  double value = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) value += row[i] * global_theta[i];
  return std::max(value, 1e-9);
}

double StageModel::predict_iteration(int scale_out, int iteration) const {
  std::vector<double> durations;
  durations.reserve(graph.stages.size());
  const auto active = graph.active_in(iteration);
  for (std::size_t i = 0; i < graph.stages.size(); ++i) {
    durations.push_back(active[i] ? predict(graph.stages[i].stage_id, scale_out) : 0.0);
  }
  return critical_path(graph, durations, active);
}

StageModel fit_stage_model(const StageGraph& graph, double data_gb, std::string machine, std::span<const StageRun> runs,
                           const StageModelOptions& options, std::span<const double> weights) {
  graph.validate();
  if (!(data_gb > 0.0)) throw ValidationError("stage model data size must be > 0");
  if (!weights.empty() && weights.size() != runs.size()) {
    throw ValidationError("stage model: one weight per run required");
  }
  StageModel model;
  model.options = options;
  model.graph = graph;
  model.data_gb = data_gb;
  model.machine = machine.empty() ? std::string("sim") : std::move(machine);
  model.history.assign(runs.begin(), runs.end());
  if (weights.empty()) {
    model.weights.assign(runs.size(), 1.0);
  } else {
    model.weights.assign(weights.begin(), weights.end());
  }
  fit_all(model);
  return model;
}

StageModel update_model_online(const StageModel& model, std::span<const StageRun> new_runs) {
  if (new_runs.empty()) throw ValidationError("update_model_online: no new runs");
  StageModel updated = model;
  std::fill(updated.weights.begin(), updated.weights.end(), 1.0);
  for (const auto& run : new_runs) {
    stage_of(updated.graph, run.stage_id);
    if (!(run.runtime_s > 0.0) || run.scale_out < 1) throw ValidationError("update_model_online: invalid stage run");
    updated.history.push_back(run);
    updated.weights.push_back(updated.options.recency_weight);
  }

  if (updated.options.kind != ModelKind::neural) {
    fit_all(updated);
    return updated;
  }

  auto tune = updated.options.neural;
  tune.fine_tune_epochs = updated.options.online_fine_tune_epochs;
  if (updated.options.scope == ModelScope::global) {
    const auto records = to_records(updated, updated.history);
    updated.global_neural = fit_neural(records, &*model.global_neural, TrainingMode::fine_tune, tune);
    return updated;
  }
  std::set<std::string> touched;
  for (const auto& run : new_runs) touched.insert(run.stage_id);
  for (const auto& stage_id : touched) {
    std::vector<StageRun> runs;
    for (const auto& run : updated.history) {
      if (run.stage_id == stage_id) runs.push_back(run);
    }
    const auto records = to_records(updated, runs);
    updated.per_stage[stage_id] = fit_neural(records, &model.per_stage.at(stage_id), TrainingMode::fine_tune, tune);
  }
  return updated;
}

std::vector<bool> detect_anomaly(std::span<const StageRun> runs, const StageModel& model, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("anomaly threshold must be > 0");
  std::vector<bool> flags;
  flags.reserve(runs.size());
  for (const auto& run : runs) flags.push_back(run.runtime_s > threshold * model.predict(run.stage_id, run.scale_out));
  return flags;
}

}  // namespace colcfg
