#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "colcfg/features.hpp"
#include "colcfg/neural.hpp"
#include "colcfg/nnls.hpp"
#include "colcfg/similarity.hpp"
#include "colcfg/types.hpp"

namespace colcfg {

// Declaration order is also the simplicity order used for CV tie-breaks.
enum class ModelKind { parametric_nnls, similarity_weighted, neural };

std::string_view to_string(ModelKind kind);
// Accepts the enum names and the short CLI aliases (parametric, similarity).
ModelKind parse_model_kind(std::string_view text);

struct ErrorMetrics {
  double mape = 0.0;  // percent
  double mae = 0.0;   // seconds
};

struct ParametricParams {
  ScaleOutFeatures theta{};
};

struct SimilarityParams {
  ScaleOutFeatures theta{};
  ExecutionContext query;
  SimilarityWeights weights;
  std::size_t rows_used = 0;
};

struct TrainedModel {
  ModelKind kind = ModelKind::parametric_nnls;
  std::variant<std::monostate, ParametricParams, SimilarityParams, NeuralParams> params;
  std::string training_fingerprint;
  ErrorMetrics val_error;  // training-set error for plain fits, CV error after select_model

  bool trained() const { return !std::holds_alternative<std::monostate>(params); }
};

// Digest over the sorted fingerprints of the training records.
std::string training_fingerprint(std::span<const ExecutionRecord> records);

// NNLS over featurize(record). Needs >= 4 records of one
// algorithm and >= 2 distinct scale-outs.
TrainedModel fit_parametric_nnls(std::span<const ExecutionRecord> records, const NnlsOptions& nnls = {});

// Same, with a non-negative weight per record.
TrainedModel fit_parametric_nnls(std::span<const ExecutionRecord> records, std::span<const double> weights,
                                 const NnlsOptions& nnls = {});

struct SimilarityFitOptions {
  SimilarityWeights weights;
  double cutoff = 0.05;
  NnlsOptions nnls;
};

// context_similarity(record, query) times local_boost for records from the
// query's origin.
std::vector<double> similarity_row_weights(std::span<const ExecutionRecord> records, const ExecutionContext& query,
                                           const Catalog& catalog, const SimilarityWeights& weights);

// Weighted NNLS; rows below the cutoff are dropped. `row_multipliers`, when
// non-empty, scales each record's weight after the cutoff (recency weights).
TrainedModel fit_similarity_weighted(std::span<const ExecutionRecord> records, const ExecutionContext& query,
                                     const Catalog& catalog, const SimilarityFitOptions& options = {},
                                     std::span<const double> row_multipliers = {});

enum class TrainingMode { scratch, pretrain, fine_tune };

std::string_view to_string(TrainingMode mode);

struct NeuralOptions {
  std::size_t encoding_dim = kDefaultEncodingDim;
  std::size_t latent_dim = kDefaultLatentDim;
  std::size_t hidden_dim = kDefaultHiddenDim;
  int autoencoder_epochs = 2000;
  double autoencoder_learning_rate = 0.5;
  int joint_epochs = 2000;
  double joint_learning_rate = 0.1;
  int fine_tune_epochs = 500;
  double fine_tune_learning_rate = 0.1;
  std::uint64_t seed = 42;
};

inline constexpr std::size_t kMinRecordsPretrain = 12;
inline constexpr std::size_t kMinRecordsScratch = 3;
inline constexpr std::size_t kMinRecordsFineTune = 3;

// scratch/pretrain: autoencoder warm start (when >= 8 distinct encodings),
// then encoder and head trained jointly on standardized log-runtime.
// fine_tune: encoder frozen, head trained from the pretrained weights.
TrainedModel fit_neural(std::span<const ExecutionRecord> records, const TrainedModel* pretrained, TrainingMode mode,
                        const NeuralOptions& options = {});

// Predicted seconds (> 0) for `candidate`; the candidate's machine replaces
// the context's machine.
double predict_runtime(const TrainedModel& model, const ExecutionContext& context, const CandidateConfig& candidate,
                       double data_size_gb);
double predict_runtime(const TrainedModel& model, const ExecutionRecord& record);

ErrorMetrics error_metrics(std::span<const double> predicted, std::span<const double> actual);
ErrorMetrics evaluate(const TrainedModel& model, std::span<const ExecutionRecord> holdout);

// Everything needed to fit one model kind.
struct ModelSpec {
  ModelKind kind = ModelKind::parametric_nnls;
  std::optional<ExecutionContext> query;  // similarity_weighted, neural
  const Catalog* catalog = nullptr;       // similarity_weighted
  SimilarityFitOptions similarity;
  NeuralOptions neural;
  NnlsOptions nnls;
};

TrainedModel fit_model(std::span<const ExecutionRecord> records, const ModelSpec& spec);

// Seeded shuffle of 0..n-1 dealt round-robin into `folds` test sets.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t folds, std::uint64_t seed);

// Mean of per-fold MAPE and MAE. Throws what the fit throws.
ErrorMetrics cross_validate(std::span<const ExecutionRecord> records, const ModelSpec& spec, std::size_t folds,
                            std::uint64_t seed);

struct KindReport {
  ModelKind kind = ModelKind::parametric_nnls;
  std::optional<ErrorMetrics> cv_error;
  std::string skip_reason;
};

struct SelectionOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  SimilarityFitOptions similarity;
  NeuralOptions neural;
  NnlsOptions nnls;
};

struct SelectionResult {
  TrainedModel model;  // refit on all records, val_error = CV error
  std::vector<KindReport> report;
};

SelectionResult select_model(std::span<const ExecutionRecord> records, const ExecutionContext& query,
                             const Catalog& catalog, std::span<const ModelKind> kinds,
                             const SelectionOptions& options = {});

}  // namespace colcfg
