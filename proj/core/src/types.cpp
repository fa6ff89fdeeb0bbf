#include "colcfg/types.hpp"

#include <algorithm>
#include <cmath>

#include "colcfg/errors.hpp"
#include "colcfg/hash.hpp"
#include "json_util.hpp"

namespace colcfg {

std::string_view to_string(MachineCategory category) {
  switch (category) {
    case MachineCategory::c:
      return "c";
    case MachineCategory::m:
      return "m";
    case MachineCategory::r:
      return "r";
    case MachineCategory::other:
      break;
  }
  return "other";
}

MachineCategory parse_category(std::string_view text) {
  if (text == "c") return MachineCategory::c;
  if (text == "m") return MachineCategory::m;
  if (text == "r") return MachineCategory::r;
  if (text == "other") return MachineCategory::other;
  throw ValidationError("unknown machine category '" + std::string(text) + "'");
}

void validate(const MachineType& machine) {
  if (machine.name.empty()) throw ValidationError("machine type name must not be empty");
  if (machine.vcpus < 1) throw ValidationError("machine type " + machine.name + ": vcpus must be >= 1");
  if (!(machine.memory_gb > 0.0) || !std::isfinite(machine.memory_gb)) {
    throw ValidationError("machine type " + machine.name + ": memory_gb must be > 0");
  }
  if (!(machine.price_per_hour >= 0.0) || !std::isfinite(machine.price_per_hour)) {
    throw ValidationError("machine type " + machine.name + ": price_per_hour must be >= 0");
  }
}

Catalog::Catalog(std::vector<MachineType> types) {
  for (auto& machine : types) add(std::move(machine));
}

void Catalog::add(MachineType machine) {
  validate(machine);
  if (auto it = index_.find(machine.name); it != index_.end()) {
    if (types_[it->second] == machine) return;
    throw MergeConflictError({machine.name});
  }
  index_.emplace(machine.name, types_.size());
  types_.push_back(std::move(machine));
}

const MachineType* Catalog::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &types_[it->second];
}

const MachineType& Catalog::at(std::string_view name) const {
  if (const auto* machine = find(name)) return *machine;
  throw ValidationError("unknown machine type '" + std::string(name) + "'");
}

std::optional<std::size_t> Catalog::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Catalog merge_catalogs(const Catalog& a, const Catalog& b) {
  std::vector<std::string> conflicts;
  for (const auto& machine : b) {
    if (const auto* existing = a.find(machine.name); existing != nullptr && !(*existing == machine)) {
      conflicts.push_back(machine.name);
    }
  }
  if (!conflicts.empty()) {
    std::sort(conflicts.begin(), conflicts.end());
    throw MergeConflictError(std::move(conflicts));
  }
  Catalog merged = a;
  for (const auto& machine : b) merged.add(machine);
  return merged;
}

namespace {

void require_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) throw ValidationError(what + " must be finite");
}

}  // namespace

void validate(const ExecutionRecord& record) {
  const auto& ctx = record.context;
  if (ctx.job.algorithm.empty()) throw ValidationError("job algorithm must not be empty");
  for (const auto& [key, value] : ctx.job.params) {
    if (const auto* number = std::get_if<double>(&value)) require_finite(*number, "job param " + key);
  }
  for (const auto& [key, value] : ctx.dataset.extra) require_finite(value, "dataset extra " + key);
  for (const auto& [key, value] : ctx.sys_config) require_finite(value, "sys_config " + key);
  if (ctx.machine.empty()) throw ValidationError("context machine reference must not be empty");
  if (record.scale_out < 1) throw ValidationError("scale_out must be >= 1");
  if (!(record.runtime_s > 0.0) || !std::isfinite(record.runtime_s)) {
    throw ValidationError("runtime_s must be a positive finite number");
  }
  if (record.stage_runs) {
    for (const auto& run : *record.stage_runs) {
      if (!(run.runtime_s > 0.0) || !std::isfinite(run.runtime_s)) {
        throw ValidationError("stage run " + run.stage_id + ": runtime_s must be > 0");
      }
      for (const auto& [key, value] : run.metrics) require_finite(value, "stage metric " + key);
    }
  }
}

std::string canonical_form(const ExecutionRecord& record) {
  auto j = detail::to_json(record);
  j.erase("timestamp");
  j.erase("fingerprint");
  for (const auto& [key, raw] : record.unknown_fields) j.erase(key);
  return detail::canonical_dump(j);
}

std::string record_fingerprint(const ExecutionRecord& record) { return to_hex(fnv1a64(canonical_form(record))); }

ExecutionRecord finalize(ExecutionRecord record) {
  validate(record);
  record.fingerprint = record_fingerprint(record);
  return record;
}

}  // namespace colcfg
