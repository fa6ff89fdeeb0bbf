#include "colcfg/repository.hpp"

#include "colcfg/errors.hpp"
#include "json_util.hpp"

namespace colcfg {

const ExecutionRecord* Repository::find(const std::string& fingerprint) const {
  auto it = records_.find(fingerprint);
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<ExecutionRecord> Repository::record_list() const {
  std::vector<ExecutionRecord> out;
  out.reserve(records_.size());
  for (const auto& [fp, record] : records_) out.push_back(record);
  return out;
}

namespace {

// Earliest timestamp wins; the serialized form settles equal timestamps so
// the survivor does not depend on merge order.
bool supersedes(const ExecutionRecord& candidate, const ExecutionRecord& kept) {
  if (candidate.timestamp != kept.timestamp) return candidate.timestamp < kept.timestamp;
  return detail::to_json(candidate).dump() < detail::to_json(kept).dump();
}

void keep_earliest(std::map<std::string, ExecutionRecord>& records, ExecutionRecord record, bool& inserted) {
  auto [it, fresh] = records.try_emplace(record.fingerprint, record);
  inserted = fresh;
  if (!fresh && supersedes(record, it->second)) it->second = std::move(record);
}

}  // namespace

bool Repository::insert(ExecutionRecord record) {
  bool inserted = false;
  keep_earliest(records_, std::move(record), inserted);
  return inserted;
}

std::vector<ExecutionRecord> union_records(std::span<const ExecutionRecord> records) {
  std::map<std::string, ExecutionRecord> merged;
  bool inserted = false;
  for (const auto& r : records) keep_earliest(merged, finalize(r), inserted);
  std::vector<ExecutionRecord> out;
  out.reserve(merged.size());
  for (auto& [fp, r] : merged) out.push_back(std::move(r));
  return out;
}

AppendResult append_record(Repository repo, ExecutionRecord record, std::optional<MachineType> machine) {
  record = finalize(std::move(record));
  if (machine) {
    if (machine->name != record.context.machine) {
      throw ValidationError("supplied machine type " + machine->name + " does not match record machine " +
                            record.context.machine);
    }
    repo.catalog_.add(std::move(*machine));
  }
  if (repo.catalog_.find(record.context.machine) == nullptr) {
    throw ValidationError("unresolved machine type '" + record.context.machine + "'");
  }
  const bool inserted = repo.insert(std::move(record));
  return {std::move(repo), inserted};
}

Repository make_repository(Catalog catalog, const std::vector<ExecutionRecord>& records) {
  Repository repo(std::move(catalog));
  for (const auto& record : records) repo = append_record(std::move(repo), record).repo;
  return repo;
}

Repository merge_repositories(const Repository& a, const Repository& b) {
  Repository merged(merge_catalogs(a.catalog_, b.catalog_));
  merged.records_ = a.records_;
  for (const auto& [fp, record] : b.records_) merged.insert(record);
  return merged;
}

bool same_record_set(const Repository& a, const Repository& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.records().begin();
  for (auto ib = b.records().begin(); ib != b.records().end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
  }
  return true;
}

bool RecordFilter::operator()(const ExecutionRecord& record) const {
  if (algorithm && record.context.job.algorithm != *algorithm) return false;
  if (machine && record.context.machine != *machine) return false;
  if (origin && record.context.origin != *origin) return false;
  if (fingerprint && record.fingerprint != *fingerprint) return false;
  return true;
}

std::vector<ExecutionRecord> query(const Repository& repo, const RecordPredicate& predicate) {
  std::vector<ExecutionRecord> out;
  for (const auto& [fp, record] : repo.records()) {
    if (predicate(record)) out.push_back(record);
  }
  return out;
}

}  // namespace colcfg
