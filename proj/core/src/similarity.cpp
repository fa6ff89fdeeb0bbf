#include "colcfg/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "colcfg/errors.hpp"

namespace colcfg {

void SimilarityWeights::validate() const {
  for (double w : {w_job, w_dataset, w_machine}) {
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("similarity weights must lie in [0,1]");
  }
  if (std::abs(w_job + w_dataset + w_machine - 1.0) > 1e-9) {
    throw ValidationError("similarity weights must sum to 1");
  }
  if (!(local_boost >= 1.0)) throw ValidationError("local_boost must be >= 1");
}

namespace {

MachineFeatures raw_features(const MachineType& m) {
  return {static_cast<double>(m.vcpus), m.memory_gb, m.price_per_hour};
}

double squared_distance(const MachineFeatures& a, const MachineFeatures& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum;
}

}  // namespace

FeatureBounds FeatureBounds::from_catalog(const Catalog& catalog) {
  FeatureBounds bounds;
  bool first = true;
  for (const auto& machine : catalog) {
    auto f = raw_features(machine);
    for (std::size_t i = 0; i < f.size(); ++i) {
      bounds.lo[i] = first ? f[i] : std::min(bounds.lo[i], f[i]);
      bounds.hi[i] = first ? f[i] : std::max(bounds.hi[i], f[i]);
    }
    first = false;
  }
  return bounds;
}

MachineFeatures FeatureBounds::normalize(const MachineType& machine) const {
  auto f = raw_features(machine);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double span = hi[i] - lo[i];
    f[i] = span > 0.0 ? std::clamp((f[i] - lo[i]) / span, 0.0, 1.0) : 0.0;
  }
  return f;
}

double machine_similarity(const MachineType& a, const MachineType& b, const FeatureBounds& bounds) {
  const double dist = std::sqrt(squared_distance(bounds.normalize(a), bounds.normalize(b)) / 3.0);
  return std::clamp(1.0 - dist, 0.0, 1.0);
}

namespace {

bool values_agree(const ParamValue& a, const ParamValue& b) {
  const auto* na = std::get_if<double>(&a);
  const auto* nb = std::get_if<double>(&b);
  if (na != nullptr && nb != nullptr) {
    const double scale = std::max(std::abs(*na), std::abs(*nb));
    return std::abs(*na - *nb) <= 0.1 * scale;
  }
  return a == b;
}

}  // namespace

JobMatchResult job_match_level(const JobSignature& a, const JobSignature& b) {
  const bool same_plan = a.plan_fingerprint && b.plan_fingerprint && *a.plan_fingerprint == *b.plan_fingerprint;
  const bool same_algorithm = a.algorithm == b.algorithm;
  if (same_plan || (same_algorithm && a.params == b.params)) return {JobMatch::exact, 1.0};
  if (!same_algorithm) return {JobMatch::none, 0.0};

  std::set<std::string> keys;
  for (const auto& [key, value] : a.params) keys.insert(key);
  for (const auto& [key, value] : b.params) keys.insert(key);
  std::size_t matched = 0;
  for (const auto& key : keys) {
    auto ia = a.params.find(key);
    auto ib = b.params.find(key);
    if (ia != a.params.end() && ib != b.params.end() && values_agree(ia->second, ib->second)) ++matched;
  }
  const double fraction = keys.empty() ? 1.0 : static_cast<double>(matched) / static_cast<double>(keys.size());
  return {JobMatch::same_algorithm, fraction};
}

double dataset_similarity(const DatasetDescriptor& a, const DatasetDescriptor& b) {
  const double la = std::log10(static_cast<double>(a.size_bytes) + 1.0);
  const double lb = std::log10(static_cast<double>(b.size_bytes) + 1.0);
  return std::clamp(1.0 - std::abs(la - lb) / 6.0, 0.0, 1.0);
}

double context_similarity(const ExecutionContext& a, const ExecutionContext& b, const SimilarityWeights& w,
                          const Catalog& catalog, const FeatureBounds& bounds) {
  const auto& ma = catalog.at(a.machine);
  const auto& mb = catalog.at(b.machine);

  const auto match = job_match_level(a.job, b.job);
  double job_score = 0.0;
  if (match.level == JobMatch::exact) {
    job_score = 1.0;
  } else if (match.level == JobMatch::same_algorithm) {
    job_score = 0.5 * match.param_similarity;
  }

  const double score = w.w_job * job_score + w.w_dataset * dataset_similarity(a.dataset, b.dataset) +
                       w.w_machine * machine_similarity(ma, mb, bounds);
  return std::clamp(score, 0.0, 1.0);
}

double context_similarity(const ExecutionContext& a, const ExecutionContext& b, const SimilarityWeights& w,
                          const Catalog& catalog) {
  return context_similarity(a, b, w, catalog, FeatureBounds::from_catalog(catalog));
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Clustering {
  std::vector<std::size_t> assignment;
  std::vector<MachineFeatures> centroids;
  double sse = std::numeric_limits<double>::infinity();
};

std::size_t nearest(const MachineFeatures& point, const std::vector<MachineFeatures>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<MachineFeatures> kmeanspp_init(const std::vector<MachineFeatures>& points, std::size_t k,
                                           std::mt19937_64& rng) {
  std::vector<MachineFeatures> centroids;
  centroids.push_back(points[rng() % points.size()]);
  std::vector<double> d2(points.size());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = squared_distance(points[i], centroids[nearest(points[i], centroids)]);
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = unit_uniform(rng) * total;
      for (pick = 0; pick + 1 < points.size(); ++pick) {
        if (u < d2[pick]) break;
        u -= d2[pick];
      }
    } else {
      pick = rng() % points.size();
    }
    centroids.push_back(points[pick]);
  }
  return centroids;
}

Clustering lloyd(const std::vector<MachineFeatures>& points, std::vector<MachineFeatures> centroids) {
  const std::size_t k = centroids.size();
  Clustering result;
  result.assignment.assign(points.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = nearest(points[i], centroids);
      if (c != result.assignment[i]) {
        result.assignment[i] = c;
        changed = true;
      }
    }
    // Empty clusters take the point farthest from its current centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (std::find(result.assignment.begin(), result.assignment.end(), c) != result.assignment.end()) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto owner = result.assignment[i];
        const auto owner_size = std::count(result.assignment.begin(), result.assignment.end(), owner);
        if (owner_size < 2) continue;
        const double d = squared_distance(points[i], centroids[owner]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      result.assignment[far] = c;
      changed = true;
    }
    for (std::size_t c = 0; c < k; ++c) {
      MachineFeatures sum{0.0, 0.0, 0.0};
      double n = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (result.assignment[i] != c) continue;
        for (std::size_t f = 0; f < sum.size(); ++f) sum[f] += points[i][f];
        n += 1.0;
      }
      for (std::size_t f = 0; f < sum.size(); ++f) centroids[c][f] = sum[f] / n;
    }
    if (!changed) break;
  }
  result.sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    result.sse += squared_distance(points[i], centroids[result.assignment[i]]);
  }
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

std::vector<ResourceGroup> group_resources(const Catalog& catalog, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw ValidationError("group_resources: k must be positive");
  if (k > catalog.size()) {
    throw ValidationError("group_resources: k=" + std::to_string(k) + " exceeds catalog size " +
                          std::to_string(catalog.size()));
  }
  const auto bounds = FeatureBounds::from_catalog(catalog);
  std::vector<MachineFeatures> points;
  for (const auto& machine : catalog) points.push_back(bounds.normalize(machine));

  constexpr int kRestarts = 10;
  std::mt19937_64 rng(seed);
  Clustering best;
  for (int restart = 0; restart < kRestarts; ++restart) {
    auto candidate = lloyd(points, kmeanspp_init(points, k, rng));
    if (candidate.sse < best.sse - 1e-12) best = std::move(candidate);
  }

  // Renumber clusters by first member so output order is canonical.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::find(order.begin(), order.end(), best.assignment[i]) == order.end()) order.push_back(best.assignment[i]);
  }
  std::vector<ResourceGroup> groups;
  for (std::size_t g = 0; g < order.size(); ++g) {
    ResourceGroup group;
    group.group_id = static_cast<int>(g);
    group.centroid = best.centroids[order[g]];
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (best.assignment[i] == order[g]) group.members.push_back(catalog.types()[i].name);
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

double within_cluster_sse(const std::vector<ResourceGroup>& groups, const Catalog& catalog) {
  const auto bounds = FeatureBounds::from_catalog(catalog);
  double sse = 0.0;
  for (const auto& group : groups) {
    MachineFeatures mean{0.0, 0.0, 0.0};
    for (const auto& name : group.members) {
      const auto f = bounds.normalize(catalog.at(name));
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += f[i];
    }
    for (auto& v : mean) v /= static_cast<double>(group.members.size());
    for (const auto& name : group.members) sse += squared_distance(bounds.normalize(catalog.at(name)), mean);
  }
  return sse;
}

}  // namespace colcfg
