#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "colcfg/types.hpp"

namespace colcfg {

struct SimilarityWeights {
  double w_job = 0.5;
  double w_dataset = 0.25;
  double w_machine = 0.25;
  double local_boost = 2.0;

  // Components in [0,1] summing to 1 (within 1e-9), local_boost >= 1.
  void validate() const;
};

// Static machine features (vcpus, memory_gb, price_per_hour).
using MachineFeatures = std::array<double, 3>;

// Min-max bounds of the static features over a catalog.
struct FeatureBounds {
  MachineFeatures lo{0.0, 0.0, 0.0};
  MachineFeatures hi{0.0, 0.0, 0.0};

  static FeatureBounds from_catalog(const Catalog& catalog);

  // Each feature mapped to [0,1]; a constant feature maps to 0.
  MachineFeatures normalize(const MachineType& machine) const;
};

// 1 - Euclidean distance between normalized features / sqrt(3), in [0,1].
double machine_similarity(const MachineType& a, const MachineType& b, const FeatureBounds& bounds);

enum class JobMatch { exact, same_algorithm, none };

struct JobMatchResult {
  JobMatch level = JobMatch::none;
  double param_similarity = 0.0;
};

// param_similarity for same-algorithm jobs is the fraction of the union of
// param keys whose values agree: numbers within 10% relative difference,
// strings exactly.
JobMatchResult job_match_level(const JobSignature& a, const JobSignature& b);

// 1 - |log10(a+1) - log10(b+1)| / 6, clamped to [0,1].
double dataset_similarity(const DatasetDescriptor& a, const DatasetDescriptor& b);

// Weighted blend of job, dataset and machine similarity. Throws
// ValidationError if either machine is missing from the catalog.
double context_similarity(const ExecutionContext& a, const ExecutionContext& b, const SimilarityWeights& w,
                          const Catalog& catalog);

// Same, with precomputed bounds (hot loop variant).
double context_similarity(const ExecutionContext& a, const ExecutionContext& b, const SimilarityWeights& w,
                          const Catalog& catalog, const FeatureBounds& bounds);

struct ResourceGroup {
  int group_id = 0;
  std::vector<std::string> members;  // catalog order
  MachineFeatures centroid{0.0, 0.0, 0.0};
};

// Seeded k-means (k-means++ init, several restarts, best SSE kept) over the
// normalized static features. Groups are numbered by their first member's
// catalog position.
std::vector<ResourceGroup> group_resources(const Catalog& catalog, std::size_t k, std::uint64_t seed);

// Within-cluster sum of squared distances in normalized feature space.
double within_cluster_sse(const std::vector<ResourceGroup>& groups, const Catalog& catalog);

}  // namespace colcfg
