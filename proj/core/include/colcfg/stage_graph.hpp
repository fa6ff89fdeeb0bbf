#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace colcfg {

struct StageSpec {
  std::string stage_id;
  std::map<std::string, double> features;  // stage descriptor
  bool per_iteration = true;               // false: runs in iteration 0 only

  bool operator==(const StageSpec&) const = default;
};

struct StageGraph {
  std::vector<StageSpec> stages;
  std::vector<std::pair<std::string, std::string>> edges;  // (before, after)
  int iterations = 1;

  // Unique non-empty ids, at least one stage, known edge endpoints, no
  // cycles, iterations >= 0.
  void validate() const;

  std::optional<std::size_t> index_of(std::string_view stage_id) const;

  // Kahn's algorithm, lowest stage index first among ready stages.
  std::vector<std::size_t> topological_order() const;

  // predecessors()[i] = indices of stages with an edge into i.
  std::vector<std::vector<std::size_t>> predecessors() const;

  // Stages that run in `iteration`.
  std::vector<bool> active_in(int iteration) const;

  bool operator==(const StageGraph&) const = default;
};

// Longest path through the active stages given per-stage durations.
// Inactive stages take zero time but still pass ordering through.
double critical_path(const StageGraph& graph, std::span<const double> durations, const std::vector<bool>& active);

}  // namespace colcfg
