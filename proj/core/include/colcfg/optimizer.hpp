#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colcfg/models.hpp"
#include "colcfg/types.hpp"

namespace colcfg {

// Inclusive lo..hi in increments of step.
struct ScaleOutRange {
  int lo = 4;
  int hi = 36;
  int step = 4;

  std::vector<int> values() const;

  // "lo:hi:step" or "lo:hi" (step 1).
  static ScaleOutRange parse(std::string_view text);

  bool operator==(const ScaleOutRange&) const = default;
};

// Catalog order x ascending scale-out.
std::vector<CandidateConfig> enumerate_candidates(const Catalog& catalog, const ScaleOutRange& range);

// price_per_hour * scale_out * runtime_s / 3600.
double estimate_cost(const CandidateConfig& candidate, double predicted_runtime_s, const Catalog& catalog);

struct RuntimeTarget {
  double target_s = 0.0;
  bool hard = false;

  bool operator==(const RuntimeTarget&) const = default;
};

enum class Objective { min_cost, min_runtime };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

struct RankedCandidate {
  CandidateConfig config;
  std::size_t catalog_index = 0;
  double predicted_runtime_s = 0.0;
  double predicted_cost = 0.0;
  bool feasible = false;
};

struct Recommendation {
  std::optional<CandidateConfig> chosen;
  double predicted_runtime_s = 0.0;  // NaN when nothing is chosen
  double predicted_cost = 0.0;       // NaN when nothing is chosen
  bool feasible = false;
  // Every candidate once: feasible ones first, then by objective, the other
  // metric, scale-out and catalog position.
  std::vector<RankedCandidate> ranking;
};

// Ranks already-predicted candidates (feasibility is recomputed from target).
Recommendation rank_candidates(std::vector<RankedCandidate> evaluated, const RuntimeTarget& target, Objective objective);

Recommendation recommend(const TrainedModel& model, const ExecutionContext& context, double data_size_gb,
                         std::span<const CandidateConfig> candidates, const Catalog& catalog,
                         const RuntimeTarget& target, Objective objective);

// Columns: machine, scale_out, predicted_runtime_s, predicted_cost, feasible.
std::string ranking_csv(const Recommendation& recommendation);

// Single-line JSON report (chosen config, predictions, target, objective).
std::string recommendation_report(const Recommendation& recommendation, const RuntimeTarget& target,
                                  Objective objective);

}  // namespace colcfg
