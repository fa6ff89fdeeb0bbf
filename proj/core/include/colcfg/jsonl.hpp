#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "colcfg/types.hpp"

namespace colcfg {

// Line-delimited JSON for records (repo.jsonl) and machine types
// (catalog.jsonl). Field names follow the struct members; unknown top-level
// record fields are carried through unchanged.

std::string to_json_line(const ExecutionRecord& record);
std::string to_json_line(const MachineType& machine);
std::string to_json_line(const ExecutionContext& context);

// Parses one record. The stored fingerprint, if any, is ignored and
// recomputed so edited files cannot smuggle in a stale digest.
ExecutionRecord record_from_json_line(std::string_view line);
MachineType machine_from_json_line(std::string_view line);
ExecutionContext context_from_json_text(std::string_view text);

std::vector<ExecutionRecord> read_records(std::istream& in);
void write_records(std::ostream& out, const std::vector<ExecutionRecord>& records);

Catalog read_catalog(std::istream& in);
void write_catalog(std::ostream& out, const Catalog& catalog);

std::vector<ExecutionRecord> load_records(const std::filesystem::path& path);
void save_records(const std::filesystem::path& path, const std::vector<ExecutionRecord>& records);
Catalog load_catalog(const std::filesystem::path& path);
void save_catalog(const std::filesystem::path& path, const Catalog& catalog);

}  // namespace colcfg
