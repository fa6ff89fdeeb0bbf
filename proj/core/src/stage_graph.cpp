#include "colcfg/stage_graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "colcfg/errors.hpp"

namespace colcfg {

std::optional<std::size_t> StageGraph::index_of(std::string_view stage_id) const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].stage_id == stage_id) return i;
  }
  return std::nullopt;
}

std::vector<std::vector<std::size_t>> StageGraph::predecessors() const {
  std::vector<std::vector<std::size_t>> preds(stages.size());
  for (const auto& [before, after] : edges) {
    const auto a = index_of(before);
    const auto b = index_of(after);
    if (!a || !b) throw ValidationError("stage graph edge references unknown stage: " + before + " -> " + after);
    preds[*b].push_back(*a);
  }
  for (auto& p : preds) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return preds;
}

std::vector<std::size_t> StageGraph::topological_order() const {
  const auto preds = predecessors();
  std::vector<std::vector<std::size_t>> succs(stages.size());
  std::vector<std::size_t> pending(stages.size());
  for (std::size_t v = 0; v < stages.size(); ++v) {
    pending[v] = preds[v].size();
    for (auto u : preds[v]) succs[u].push_back(v);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < stages.size(); ++v) {
    if (pending[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const auto u = ready.top();
    ready.pop();
    order.push_back(u);
    for (auto v : succs[u]) {
      if (--pending[v] == 0) ready.push(v);
    }
  }
  if (order.size() != stages.size()) throw ValidationError("stage graph contains a cycle");
  return order;
}

void StageGraph::validate() const {
  if (stages.empty()) throw ValidationError("stage graph needs at least one stage");
  if (iterations < 0) throw ValidationError("stage graph iterations must be >= 0");
  std::set<std::string> ids;
  for (const auto& stage : stages) {
    if (stage.stage_id.empty()) throw ValidationError("stage id must not be empty");
    if (!ids.insert(stage.stage_id).second) throw ValidationError("duplicate stage id '" + stage.stage_id + "'");
  }
  for (const auto& [before, after] : edges) {
    if (before == after) throw ValidationError("stage graph contains a self loop on '" + before + "'");
  }
  topological_order();
}

std::vector<bool> StageGraph::active_in(int iteration) const {
  std::vector<bool> active(stages.size());
  for (std::size_t i = 0; i < stages.size(); ++i) active[i] = iteration == 0 || stages[i].per_iteration;
  return active;
}

double critical_path(const StageGraph& graph, std::span<const double> durations, const std::vector<bool>& active) {
  if (durations.size() != graph.stages.size() || active.size() != graph.stages.size()) {
    throw ValidationError("critical_path: one duration per stage required");
  }
  const auto preds = graph.predecessors();
  std::vector<double> finish(graph.stages.size(), 0.0);
  double longest = 0.0;
  for (auto v : graph.topological_order()) {
    double start = 0.0;
    for (auto u : preds[v]) start = std::max(start, finish[u]);
    finish[v] = active[v] ? start + durations[v] : start;
    longest = std::max(longest, finish[v]);
  }
  return longest;
}

}  // namespace colcfg
