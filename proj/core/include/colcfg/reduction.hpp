#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "colcfg/models.hpp"
#include "colcfg/types.hpp"

namespace colcfg {

struct ReductionOptions {
  ModelSpec eval;           // model whose CV-MAPE guides the elimination
  std::size_t folds = 5;
  std::size_t stride = 5;   // removals between re-evaluations
  std::uint64_t seed = 42;
};

// Smallest training set the kind accepts.
std::size_t minimum_trainable_size(ModelKind kind);

// Records with the smallest and largest scale-out per (algorithm, machine)
// group; ties go to the smaller fingerprint.
std::vector<ExecutionRecord> reduction_anchors(std::span<const ExecutionRecord> records);

// CV-MAPE of the eval model, pooled over per-algorithm groups (weighted by
// group size). Infinity when some group cannot be cross-validated.
double reduction_score(std::span<const ExecutionRecord> records, const ReductionOptions& options);

// Keeps `budget` records: all anchors, then greedy backward elimination of
// the records whose removal raises CV-MAPE the least, re-scored every
// `stride` removals. Input order is preserved.
std::vector<ExecutionRecord> reduce_training_data(std::span<const ExecutionRecord> records, std::size_t budget,
                                                  const ReductionOptions& options = {});

}  // namespace colcfg
