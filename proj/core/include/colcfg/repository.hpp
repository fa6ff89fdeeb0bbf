#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colcfg/types.hpp"

namespace colcfg {

struct AppendResult;

// Set of records keyed by fingerprint plus the machine catalog they refer to.
// Values are immutable from the outside; the free functions below return new
// repositories.
class Repository {
 public:
  Repository() = default;
  explicit Repository(Catalog catalog) : catalog_(std::move(catalog)) {}

  const Catalog& catalog() const { return catalog_; }
  const std::map<std::string, ExecutionRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const ExecutionRecord* find(const std::string& fingerprint) const;

  // Records in fingerprint order.
  std::vector<ExecutionRecord> record_list() const;

 private:
  friend AppendResult append_record(Repository repo, ExecutionRecord record, std::optional<MachineType> machine);
  friend Repository merge_repositories(const Repository& a, const Repository& b);

  // Keeps the earliest timestamp on fingerprint collisions. Returns true when
  // the fingerprint was new.
  bool insert(ExecutionRecord record);

  Catalog catalog_;
  std::map<std::string, ExecutionRecord> records_;
};

struct AppendResult {
  Repository repo;
  bool inserted = false;
};

// `machine` may carry the record's machine type when the catalog does not
// have it yet. Pass the repository by value (std::move it) for O(log n).
AppendResult append_record(Repository repo, ExecutionRecord record, std::optional<MachineType> machine = std::nullopt);

// Builds a repository from loose records, validating each against the catalog.
Repository make_repository(Catalog catalog, const std::vector<ExecutionRecord>& records);

Repository merge_repositories(const Repository& a, const Repository& b);

// Fingerprint dedup of loose records without catalog checks, same
// earliest-timestamp rule as a repository; result in fingerprint order.
std::vector<ExecutionRecord> union_records(std::span<const ExecutionRecord> records);

// True when both hold the same fingerprints (catalogs ignored).
bool same_record_set(const Repository& a, const Repository& b);

using RecordPredicate = std::function<bool(const ExecutionRecord&)>;

// Conjunctive filter over the commonly queried fields; unset fields match all.
struct RecordFilter {
  std::optional<std::string> algorithm;
  std::optional<std::string> machine;
  std::optional<std::string> origin;
  std::optional<std::string> fingerprint;

  bool operator()(const ExecutionRecord& record) const;
};

// All matching records in fingerprint order.
std::vector<ExecutionRecord> query(const Repository& repo, const RecordPredicate& predicate);

}  // namespace colcfg
