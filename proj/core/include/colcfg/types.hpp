#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace colcfg {

enum class MachineCategory { c, m, r, other };

std::string_view to_string(MachineCategory category);
MachineCategory parse_category(std::string_view text);

struct MachineType {
  std::string name;
  MachineCategory category = MachineCategory::other;
  int vcpus = 1;
  double memory_gb = 1.0;
  double price_per_hour = 0.0;  // cost units per hour

  friend bool operator==(const MachineType&, const MachineType&) = default;
};

void validate(const MachineType& machine);

// Ordered set of machine types with unique names. Iteration order is the
// insertion order, which is what candidate enumeration uses.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<MachineType> types);

  // Adds a type. Re-adding an identical entry is a no-op; the same name with
  // different fields throws MergeConflictError.
  void add(MachineType machine);

  const MachineType* find(std::string_view name) const;
  const MachineType& at(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  const std::vector<MachineType>& types() const { return types_; }
  std::size_t size() const { return types_.size(); }
  bool empty() const { return types_.empty(); }
  auto begin() const { return types_.begin(); }
  auto end() const { return types_.end(); }

 private:
  std::vector<MachineType> types_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Union by name; conflicting entries across both sides are reported together.
Catalog merge_catalogs(const Catalog& a, const Catalog& b);

using ParamValue = std::variant<double, std::string>;

struct JobSignature {
  std::string algorithm;
  std::map<std::string, ParamValue> params;
  std::optional<std::string> plan_fingerprint;

  friend bool operator==(const JobSignature&, const JobSignature&) = default;
};

struct DatasetDescriptor {
  std::uint64_t size_bytes = 0;
  std::optional<std::uint64_t> records;
  std::optional<std::uint64_t> features;
  std::map<std::string, double> extra;

  // Canonical unit for scale-out features.
  double size_gb() const { return static_cast<double>(size_bytes) / 1e9; }

  friend bool operator==(const DatasetDescriptor&, const DatasetDescriptor&) = default;
};

struct ExecutionContext {
  JobSignature job;
  DatasetDescriptor dataset;
  std::string machine;
  std::map<std::string, double> sys_config;
  std::string origin;

  bool is_local_to(std::string_view querying_origin) const { return origin == querying_origin; }

  friend bool operator==(const ExecutionContext&, const ExecutionContext&) = default;
};

struct StageRun {
  std::string stage_id;
  int iteration = 0;
  int scale_out = 1;
  double runtime_s = 0.0;
  std::map<std::string, double> metrics;
  bool anomalous = false;  // generator label, never read by the controller

  friend bool operator==(const StageRun&, const StageRun&) = default;
};

struct ExecutionRecord {
  ExecutionContext context;
  int scale_out = 1;
  double runtime_s = 0.0;
  std::optional<std::vector<StageRun>> stage_runs;
  std::string timestamp;    // ISO-8601
  std::string fingerprint;  // derived, see record_fingerprint
  // Top-level fields this version does not know, kept as raw JSON text so
  // they survive a load/save cycle.
  std::map<std::string, std::string> unknown_fields;

  friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
};

void validate(const ExecutionRecord& record);

// A (machine type, scale-out) choice.
struct CandidateConfig {
  std::string machine;
  int scale_out = 1;

  friend bool operator==(const CandidateConfig&, const CandidateConfig&) = default;
};

// Sorted-key JSON over every field except timestamp, fingerprint and unknown
// fields. Reals use 12 significant digits.
std::string canonical_form(const ExecutionRecord& record);

// Hex digest of canonical_form.
std::string record_fingerprint(const ExecutionRecord& record);

// Validates and fills in the fingerprint.
ExecutionRecord finalize(ExecutionRecord record);

}  // namespace colcfg
