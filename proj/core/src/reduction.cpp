#include "colcfg/reduction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "colcfg/errors.hpp"

namespace colcfg {

std::size_t minimum_trainable_size(ModelKind kind) {
  switch (kind) {
    case ModelKind::parametric_nnls:
    case ModelKind::similarity_weighted:
      return 4;
    case ModelKind::neural:
      return kMinRecordsPretrain;
  }
  return 4;
}

namespace {

std::vector<std::size_t> anchor_indices(std::span<const ExecutionRecord> records) {
  // (algorithm, machine) -> (min index, max index)
  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> groups;
  auto better = [&](std::size_t a, std::size_t b, bool want_min) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    if (ra.scale_out != rb.scale_out) return want_min ? ra.scale_out < rb.scale_out : ra.scale_out > rb.scale_out;
    return ra.fingerprint < rb.fingerprint;
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto key = std::make_pair(records[i].context.job.algorithm, records[i].context.machine);
    auto [it, inserted] = groups.try_emplace(key, i, i);
    if (inserted) continue;
    if (better(i, it->second.first, true)) it->second.first = i;
    if (better(i, it->second.second, false)) it->second.second = i;
  }
  std::set<std::size_t> out;
  for (const auto& [key, mm] : groups) {
    out.insert(mm.first);
    out.insert(mm.second);
  }
  return {out.begin(), out.end()};
}

}  // namespace

std::vector<ExecutionRecord> reduction_anchors(std::span<const ExecutionRecord> records) {
  std::vector<ExecutionRecord> out;
  for (auto i : anchor_indices(records)) out.push_back(records[i]);
  return out;
}

double reduction_score(std::span<const ExecutionRecord> records, const ReductionOptions& options) {
  std::map<std::string, std::vector<ExecutionRecord>> by_algorithm;
  for (const auto& r : records) by_algorithm[r.context.job.algorithm].push_back(r);
  double weighted = 0.0;
  for (const auto& [algorithm, group] : by_algorithm) {
    const std::size_t folds = std::min(options.folds, group.size());
    try {
      weighted += cross_validate(group, options.eval, folds, options.seed).mape * static_cast<double>(group.size());
    } catch (const ValidationError&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return weighted / static_cast<double>(records.size());
}

std::vector<ExecutionRecord> reduce_training_data(std::span<const ExecutionRecord> records, std::size_t budget,
                                                  const ReductionOptions& options) {
  if (budget >= records.size()) return {records.begin(), records.end()};
  const std::size_t minimum = minimum_trainable_size(options.eval.kind);
  if (budget < minimum) {
    throw ValidationError("reduce: budget " + std::to_string(budget) + " is below the minimum trainable size " +
                          std::to_string(minimum) + " for " + std::string(to_string(options.eval.kind)));
  }
  if (options.stride == 0) throw ValidationError("reduce: stride must be positive");

  const auto anchors = anchor_indices(records);
  if (anchors.size() > budget) {
    throw ValidationError("reduce: budget " + std::to_string(budget) + " cannot hold the " +
                          std::to_string(anchors.size()) + " min/max scale-out anchor records");
  }

  std::vector<bool> kept(records.size(), true);
  std::vector<bool> is_anchor(records.size(), false);
  for (auto i : anchors) is_anchor[i] = true;
  std::size_t size = records.size();

  auto current = [&](std::size_t skip) {
    std::vector<ExecutionRecord> out;
    out.reserve(size);
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (kept[i] && i != skip) out.push_back(records[i]);
    }
    return out;
  };

  while (size > budget) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!kept[i] || is_anchor[i]) continue;
      scored.emplace_back(reduction_score(current(i), options), i);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return records[a.second].fingerprint < records[b.second].fingerprint;
    });
    const std::size_t drop = std::min({options.stride, size - budget, scored.size()});
    for (std::size_t k = 0; k < drop; ++k) kept[scored[k].second] = false;
    size -= drop;
  }
  return current(records.size());
}

}  // namespace colcfg
