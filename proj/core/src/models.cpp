#include "colcfg/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "colcfg/errors.hpp"
#include "colcfg/hash.hpp"

namespace colcfg {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::parametric_nnls:
      return "parametric_nnls";
    case ModelKind::similarity_weighted:
      return "similarity_weighted";
    case ModelKind::neural:
      return "neural";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "parametric_nnls" || text == "parametric") return ModelKind::parametric_nnls;
  if (text == "similarity_weighted" || text == "similarity") return ModelKind::similarity_weighted;
  if (text == "neural") return ModelKind::neural;
  throw ValidationError("unknown model kind '" + std::string(text) + "'");
}

std::string_view to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::scratch:
      return "scratch";
    case TrainingMode::pretrain:
      return "pretrain";
    case TrainingMode::fine_tune:
      return "fine_tune";
  }
  return "unknown";
}

std::string training_fingerprint(std::span<const ExecutionRecord> records) {
  std::vector<std::string> fps;
  fps.reserve(records.size());
  for (const auto& r : records) fps.push_back(r.fingerprint.empty() ? record_fingerprint(r) : r.fingerprint);
  std::sort(fps.begin(), fps.end());
  std::string joined;
  for (const auto& fp : fps) {
    joined += fp;
    joined += '\n';
  }
  return to_hex(fnv1a64(joined));
}

namespace {

void require_trainable_rows(std::span<const ExecutionRecord> records, std::string_view what) {
  if (records.size() < 4) {
    throw UndertrainedError(std::string(what) + ": needs at least 4 records, got " + std::to_string(records.size()));
  }
  std::set<int> scale_outs;
  for (const auto& r : records) scale_outs.insert(r.scale_out);
  if (scale_outs.size() < 2) {
    throw UndertrainedError(std::string(what) + ": design matrix is rank-deficient (needs >= 2 distinct scale-outs)");
  }
}

ScaleOutFeatures to_array(const Eigen::VectorXd& v) {
  ScaleOutFeatures out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[static_cast<Eigen::Index>(i)];
  return out;
}

ScaleOutFeatures weighted_theta(std::span<const ExecutionRecord> records, std::span<const double> weights,
                                const NnlsOptions& nnls) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records.size()), 4);
  Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
  Eigen::VectorXd w(static_cast<Eigen::Index>(records.size()));
  const double w_max = weights.empty() ? 1.0 : *std::max_element(weights.begin(), weights.end());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto f = featurize(records[i]);
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < 4; ++j) x(row, j) = f[static_cast<std::size_t>(j)];
    y[row] = records[i].runtime_s;
    // Normalized so equal weights reproduce the unweighted fit exactly.
    w[row] = weights.empty() ? 1.0 : weights[i] / w_max;
  }
  return to_array(solve_weighted_nnls(x, y, w, nnls).coefficients);
}

double linear_prediction(const ScaleOutFeatures& theta, int scale_out, double data_size_gb) {
  // Floor keeps predictions strictly positive when every active basis is 0.
  return std::max(dot(theta, featurize(scale_out, data_size_gb)), 1e-9);
}

TrainedModel finish(TrainedModel model, std::span<const ExecutionRecord> records) {
  model.training_fingerprint = training_fingerprint(records);
  model.val_error = evaluate(model, records);
  return model;
}

}  // namespace

TrainedModel fit_parametric_nnls(std::span<const ExecutionRecord> records, std::span<const double> weights,
                                 const NnlsOptions& nnls) {
  require_trainable_rows(records, "parametric_nnls");
  for (const auto& r : records) {
    if (r.context.job.algorithm != records.front().context.job.algorithm) {
      throw ValidationError("parametric_nnls: records must share one job algorithm (" +
                            records.front().context.job.algorithm + " vs " + r.context.job.algorithm + ")");
    }
  }
  if (!weights.empty() && weights.size() != records.size()) {
    throw ValidationError("parametric_nnls: one weight per record required");
  }
  TrainedModel model;
  model.kind = ModelKind::parametric_nnls;
  model.params = ParametricParams{weighted_theta(records, weights, nnls)};
  return finish(std::move(model), records);
}

TrainedModel fit_parametric_nnls(std::span<const ExecutionRecord> records, const NnlsOptions& nnls) {
  return fit_parametric_nnls(records, std::span<const double>{}, nnls);
}

std::vector<double> similarity_row_weights(std::span<const ExecutionRecord> records, const ExecutionContext& query,
                                           const Catalog& catalog, const SimilarityWeights& weights) {
  weights.validate();
  const auto bounds = FeatureBounds::from_catalog(catalog);
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double sim = context_similarity(r.context, query, weights, catalog, bounds);
    out.push_back(sim * (r.context.is_local_to(query.origin) ? weights.local_boost : 1.0));
  }
  return out;
}

TrainedModel fit_similarity_weighted(std::span<const ExecutionRecord> records, const ExecutionContext& query,
                                     const Catalog& catalog, const SimilarityFitOptions& options,
                                     std::span<const double> row_multipliers) {
  if (!row_multipliers.empty() && row_multipliers.size() != records.size()) {
    throw ValidationError("similarity_weighted: one multiplier per record required");
  }
  const auto raw = similarity_row_weights(records, query, catalog, options.weights);
  std::vector<ExecutionRecord> kept;
  std::vector<double> kept_weights;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (raw[i] < options.cutoff) continue;
    kept.push_back(records[i]);
    kept_weights.push_back(raw[i] * (row_multipliers.empty() ? 1.0 : row_multipliers[i]));
  }
  if (kept.empty()) {
    throw NoUsableDataError("similarity_weighted: every record falls below the similarity cutoff " +
                            std::to_string(options.cutoff));
  }
  require_trainable_rows(kept, "similarity_weighted");

  SimilarityParams params;
  params.theta = weighted_theta(kept, kept_weights, options.nnls);
  params.query = query;
  params.weights = options.weights;
  params.rows_used = kept.size();

  TrainedModel model;
  model.kind = ModelKind::similarity_weighted;
  model.params = std::move(params);
  return finish(std::move(model), records);
}

namespace {

Eigen::Vector4d feature_column(int scale_out, double data_size_gb) {
  const auto f = featurize(scale_out, data_size_gb);
  return Eigen::Vector4d(f[0], f[1], f[2], f[3]);
}

RegressionBatch make_batch(std::span<const ExecutionRecord> records, const NeuralParams& params, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(records.size());
  RegressionBatch batch;
  batch.encodings.resize(static_cast<Eigen::Index>(dim), n);
  batch.features.resize(4, n);
  batch.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    batch.encodings.col(i) = encode_context(r.context, dim);
    batch.features.col(i) = (feature_column(r.scale_out, r.context.dataset.size_gb()) - params.feature_mean)
                                .cwiseQuotient(params.feature_scale);
    batch.targets[i] = (std::log(r.runtime_s) - params.target_mean) / params.target_scale;
  }
  return batch;
}

void fit_standardization(std::span<const ExecutionRecord> records, NeuralParams& params) {
  const double n = static_cast<double>(records.size());
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  Eigen::Vector4d sq = Eigen::Vector4d::Zero();
  double t_sum = 0.0;
  double t_sq = 0.0;
  for (const auto& r : records) {
    const auto f = feature_column(r.scale_out, r.context.dataset.size_gb());
    sum += f;
    sq += f.cwiseProduct(f);
    const double t = std::log(r.runtime_s);
    t_sum += t;
    t_sq += t * t;
  }
  params.feature_mean = sum / n;
  const Eigen::Vector4d var = (sq / n - params.feature_mean.cwiseProduct(params.feature_mean)).cwiseMax(0.0);
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double sd = std::sqrt(var[j]);
    // Constant columns (the bias feature) pass through unscaled.
    if (sd < 1e-9) {
      params.feature_mean[j] = 0.0;
      params.feature_scale[j] = 1.0;
    } else {
      params.feature_scale[j] = sd;
    }
  }
  params.target_mean = t_sum / n;
  const double t_sd = std::sqrt(std::max(0.0, t_sq / n - params.target_mean * params.target_mean));
  params.target_scale = t_sd < 1e-6 ? 1.0 : t_sd;
}

void gradient_steps(NeuralParams& params, const RegressionBatch& batch, int epochs, double lr, bool train_encoder) {
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const auto g = regression_gradient(params, batch);
    params.head.w1 -= lr * g.head.w1;
    params.head.b1 -= lr * g.head.b1;
    params.head.w2 -= lr * g.head.w2;
    params.head.b2 -= lr * g.head.b2;
    if (train_encoder) {
      params.autoencoder.enc_w -= lr * g.enc_w;
      params.autoencoder.enc_b -= lr * g.enc_b;
    }
  }
}

}  // namespace

TrainedModel fit_neural(std::span<const ExecutionRecord> records, const TrainedModel* pretrained, TrainingMode mode,
                        const NeuralOptions& options) {
  const std::size_t needed = mode == TrainingMode::pretrain  ? kMinRecordsPretrain
                             : mode == TrainingMode::scratch ? kMinRecordsScratch
                                                             : kMinRecordsFineTune;
  if (records.size() < needed) {
    throw UndertrainedError("neural (" + std::string(to_string(mode)) + "): needs at least " + std::to_string(needed) +
                            " records, got " + std::to_string(records.size()));
  }

  NeuralParams params;
  if (mode == TrainingMode::fine_tune) {
    if (pretrained == nullptr || !std::holds_alternative<NeuralParams>(pretrained->params)) {
      throw UndertrainedError("neural (fine_tune): requires pretrained neural parameters");
    }
    params = std::get<NeuralParams>(pretrained->params);
    const auto batch = make_batch(records, params, params.autoencoder.input_dim());
    gradient_steps(params, batch, options.fine_tune_epochs, options.fine_tune_learning_rate, false);
  } else {
    params.seed = options.seed;
    fit_standardization(records, params);

    std::vector<Eigen::VectorXd> encodings;
    std::set<std::vector<double>> distinct;
    for (const auto& r : records) {
      encodings.push_back(encode_context(r.context, options.encoding_dim));
      distinct.emplace(encodings.back().data(), encodings.back().data() + encodings.back().size());
    }
    if (distinct.size() >= 8) {
      AutoencoderOptions ae;
      ae.latent_dim = options.latent_dim;
      ae.epochs = options.autoencoder_epochs;
      ae.learning_rate = options.autoencoder_learning_rate;
      ae.seed = options.seed;
      params.autoencoder = train_autoencoder(encodings, ae).params;
    } else {
      params.autoencoder = init_autoencoder(options.encoding_dim, options.latent_dim, options.seed);
    }
    params.head = init_head(options.latent_dim + 4, options.hidden_dim, options.seed);
    const auto batch = make_batch(records, params, options.encoding_dim);
    gradient_steps(params, batch, options.joint_epochs, options.joint_learning_rate, true);
  }

  TrainedModel model;
  model.kind = ModelKind::neural;
  model.params = std::move(params);
  return finish(std::move(model), records);
}

double predict_runtime(const TrainedModel& model, const ExecutionContext& context, const CandidateConfig& candidate,
                       double data_size_gb) {
  if (!model.trained()) throw ValidationError("model is not trained");
  if (candidate.scale_out < 1) throw ValidationError("candidate scale_out must be >= 1");
  if (const auto* p = std::get_if<ParametricParams>(&model.params)) {
    return linear_prediction(p->theta, candidate.scale_out, data_size_gb);
  }
  if (const auto* p = std::get_if<SimilarityParams>(&model.params)) {
    return linear_prediction(p->theta, candidate.scale_out, data_size_gb);
  }
  const auto& p = std::get<NeuralParams>(model.params);
  ExecutionContext ctx = context;
  ctx.machine = candidate.machine;
  Eigen::MatrixXd enc = encode_context(ctx, p.autoencoder.input_dim());
  Eigen::MatrixXd feat = (feature_column(candidate.scale_out, data_size_gb) - p.feature_mean).cwiseQuotient(p.feature_scale);
  const double z = head_forward(p, enc, feat)[0];
  return std::exp(z * p.target_scale + p.target_mean);
}

double predict_runtime(const TrainedModel& model, const ExecutionRecord& record) {
  return predict_runtime(model, record.context, {record.context.machine, record.scale_out},
                         record.context.dataset.size_gb());
}

ErrorMetrics error_metrics(std::span<const double> predicted, std::span<const double> actual) {
  if (actual.empty()) throw ValidationError("evaluate: holdout is empty");
  if (predicted.size() != actual.size()) throw ValidationError("evaluate: prediction/actual size mismatch");
  double ape = 0.0;
  double ae = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!(actual[i] > 0.0)) throw ValidationError("evaluate: actual runtimes must be > 0");
    const double err = std::abs(predicted[i] - actual[i]);
    ape += err / actual[i];
    ae += err;
  }
  const double n = static_cast<double>(actual.size());
  return {100.0 * ape / n, ae / n};
}

ErrorMetrics evaluate(const TrainedModel& model, std::span<const ExecutionRecord> holdout) {
  if (holdout.empty()) throw ValidationError("evaluate: holdout is empty");
  std::vector<double> predicted;
  std::vector<double> actual;
  for (const auto& r : holdout) {
    predicted.push_back(predict_runtime(model, r));
    actual.push_back(r.runtime_s);
  }
  return error_metrics(predicted, actual);
}

TrainedModel fit_model(std::span<const ExecutionRecord> records, const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::parametric_nnls:
      return fit_parametric_nnls(records, spec.nnls);
    case ModelKind::similarity_weighted: {
      if (!spec.query || spec.catalog == nullptr) {
        throw ValidationError("similarity_weighted: needs a query context and a catalog");
      }
      auto options = spec.similarity;
      options.nnls = spec.nnls;
      return fit_similarity_weighted(records, *spec.query, *spec.catalog, options);
    }
    case ModelKind::neural:
      return fit_neural(records, nullptr,
                        records.size() >= kMinRecordsPretrain ? TrainingMode::pretrain : TrainingMode::scratch,
                        spec.neural);
  }
  throw ValidationError("unknown model kind");
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (n < folds) {
    throw ValidationError("cross-validation: " + std::to_string(n) + " records cannot fill " + std::to_string(folds) +
                          " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < n; ++i) out[i % folds].push_back(order[i]);
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

ErrorMetrics cross_validate(std::span<const ExecutionRecord> records, const ModelSpec& spec, std::size_t folds,
                            std::uint64_t seed) {
  const auto test_sets = kfold_indices(records.size(), folds, seed);
  ErrorMetrics total;
  for (const auto& test : test_sets) {
    std::vector<ExecutionRecord> train;
    std::vector<ExecutionRecord> holdout;
    std::size_t t = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (t < test.size() && test[t] == i) {
        holdout.push_back(records[i]);
        ++t;
      } else {
        train.push_back(records[i]);
      }
    }
    const auto model = fit_model(train, spec);
    const auto m = evaluate(model, holdout);
    total.mape += m.mape;
    total.mae += m.mae;
  }
  total.mape /= static_cast<double>(test_sets.size());
  total.mae /= static_cast<double>(test_sets.size());
  return total;
}

SelectionResult select_model(std::span<const ExecutionRecord> records, const ExecutionContext& query,
                             const Catalog& catalog, std::span<const ModelKind> kinds,
                             const SelectionOptions& options) {
  if (kinds.empty()) throw ValidationError("select_model: no model kinds offered");
  if (records.size() < options.folds) {
    throw UndertrainedError("select_model: needs at least " + std::to_string(options.folds) + " records");
  }
  std::vector<ModelKind> ordered(kinds.begin(), kinds.end());
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  SelectionResult result;
  std::optional<ModelKind> best;
  double best_mape = 0.0;
  for (const auto kind : ordered) {
    ModelSpec spec;
    spec.kind = kind;
    spec.query = query;
    spec.catalog = &catalog;
    spec.similarity = options.similarity;
    spec.neural = options.neural;
    spec.nnls = options.nnls;
    KindReport entry;
    entry.kind = kind;
    try {
      entry.cv_error = cross_validate(records, spec, options.folds, options.seed);
      // Strict comparison: the earlier (simpler) kind keeps ties.
      if (!best || entry.cv_error->mape < best_mape) {
        best = kind;
        best_mape = entry.cv_error->mape;
      }
    } catch (const ValidationError& e) {
      entry.skip_reason = e.what();
    }
    result.report.push_back(std::move(entry));
  }
  if (!best) {
    std::string reasons;
    for (const auto& entry : result.report) {
      reasons += "\n  " + std::string(to_string(entry.kind)) + ": " + entry.skip_reason;
    }
    throw UndertrainedError("select_model: every model kind failed:" + reasons);
  }

  ModelSpec spec;
  spec.kind = *best;
  spec.query = query;
  spec.catalog = &catalog;
  spec.similarity = options.similarity;
  spec.neural = options.neural;
  spec.nnls = options.nnls;
  result.model = fit_model(records, spec);
  for (const auto& entry : result.report) {
    if (entry.kind == *best) result.model.val_error = *entry.cv_error;
  }
  return result;
}

}  // namespace colcfg
