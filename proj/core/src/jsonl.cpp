#include "colcfg/jsonl.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "colcfg/errors.hpp"
#include "json_util.hpp"

namespace colcfg {

namespace detail {

namespace {

void dump_canonical(const json& value, std::string& out) {
  switch (value.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : value.items()) {  // std::map keeps keys sorted
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        dump_canonical(item, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ',';
        first = false;
        dump_canonical(item, out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      double d = value.get<double>();
      if (d == 0.0) d = 0.0;  // fold -0
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", d);
      out += buf;
      break;
    }
    default:
      out += value.dump();
  }
}

std::map<std::string, double> number_map(const json& j, std::string_view what) {
  std::map<std::string, double> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ValidationError(std::string(what) + "." + key + " must be a number");
    out.emplace(key, value.get<double>());
  }
  return out;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T require_as(const json& j, const char* key) {
  const auto& v = require(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

std::uint64_t require_count(const json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer() && !(v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())) {
    throw ValidationError(std::string("field '") + key + "' must be an integer");
  }
  if (v.is_number_float() ? v.get<double>() < 0 : (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ValidationError(std::string("field '") + key + "' must be non-negative");
  }
  return v.is_number_float() ? static_cast<std::uint64_t>(v.get<double>()) : v.get<std::uint64_t>();
}

const std::set<std::string>& known_record_fields() {
  static const std::set<std::string> kFields = {"context",   "scale_out",   "runtime_s",
                                                "stage_runs", "timestamp", "fingerprint"};
  return kFields;
}

}  // namespace

std::string canonical_dump(const json& value) {
  std::string out;
  dump_canonical(value, out);
  return out;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed " + std::string(what) + ": " + e.what());
  }
}

json to_json(const MachineType& machine) {
  return json{{"name", machine.name},
              {"category", std::string(to_string(machine.category))},
              {"vcpus", machine.vcpus},
              {"memory_gb", machine.memory_gb},
              {"price_per_hour", machine.price_per_hour}};
}

MachineType machine_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("machine type must be a JSON object");
  MachineType machine;
  machine.name = require_as<std::string>(j, "name");
  machine.category = parse_category(require_as<std::string>(j, "category"));
  machine.vcpus = require_as<int>(j, "vcpus");
  machine.memory_gb = require_as<double>(j, "memory_gb");
  machine.price_per_hour = require_as<double>(j, "price_per_hour");
  validate(machine);
  return machine;
}

json to_json(const ExecutionContext& context) {
  json params = json::object();
  for (const auto& [key, value] : context.job.params) {
    std::visit([&](const auto& v) { params[key] = v; }, value);
  }
  json job = {{"algorithm", context.job.algorithm}, {"params", params}};
  if (context.job.plan_fingerprint) job["plan_fingerprint"] = *context.job.plan_fingerprint;

  json dataset = {{"size_bytes", context.dataset.size_bytes}, {"extra", context.dataset.extra}};
  if (context.dataset.records) dataset["records"] = *context.dataset.records;
  if (context.dataset.features) dataset["features"] = *context.dataset.features;

  return json{{"job", job},
              {"dataset", dataset},
              {"machine", context.machine},
              {"sys_config", context.sys_config},
              {"origin", context.origin}};
}

ExecutionContext context_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("context must be a JSON object");
  ExecutionContext ctx;
  const auto& job = require(j, "job");
  ctx.job.algorithm = require_as<std::string>(job, "algorithm");
  if (auto it = job.find("params"); it != job.end() && !it->is_null()) {
    for (const auto& [key, value] : it->items()) {
      if (value.is_number()) {
        ctx.job.params.emplace(key, value.get<double>());
      } else if (value.is_string()) {
        ctx.job.params.emplace(key, value.get<std::string>());
      } else {
        throw ValidationError("job param '" + key + "' must be a number or string");
      }
    }
  }
  if (auto it = job.find("plan_fingerprint"); it != job.end() && !it->is_null()) {
    ctx.job.plan_fingerprint = it->get<std::string>();
  }

  const auto& dataset = require(j, "dataset");
  ctx.dataset.size_bytes = require_count(dataset, "size_bytes");
  if (dataset.contains("records") && !dataset["records"].is_null()) ctx.dataset.records = require_count(dataset, "records");
  if (dataset.contains("features") && !dataset["features"].is_null()) {
    ctx.dataset.features = require_count(dataset, "features");
  }
  if (auto it = dataset.find("extra"); it != dataset.end()) ctx.dataset.extra = number_map(*it, "dataset.extra");

  ctx.machine = require_as<std::string>(j, "machine");
  if (auto it = j.find("sys_config"); it != j.end()) ctx.sys_config = number_map(*it, "sys_config");
  ctx.origin = j.value("origin", std::string{});
  return ctx;
}

json to_json(const StageRun& run) {
  return json{{"stage_id", run.stage_id},   {"iteration", run.iteration}, {"scale_out", run.scale_out},
              {"runtime_s", run.runtime_s}, {"metrics", run.metrics},     {"anomalous", run.anomalous}};
}

StageRun stage_run_from_json(const json& j) {
  StageRun run;
  run.stage_id = require_as<std::string>(j, "stage_id");
  run.iteration = require_as<int>(j, "iteration");
  run.scale_out = require_as<int>(j, "scale_out");
  run.runtime_s = require_as<double>(j, "runtime_s");
  if (auto it = j.find("metrics"); it != j.end()) run.metrics = number_map(*it, "metrics");
  run.anomalous = j.value("anomalous", false);
  return run;
}

json to_json(const ExecutionRecord& record) {
  json j = json::object();
  for (const auto& [key, raw] : record.unknown_fields) j[key] = json::parse(raw);
  j["context"] = to_json(record.context);
  j["scale_out"] = record.scale_out;
  j["runtime_s"] = record.runtime_s;
  if (record.stage_runs) {
    json runs = json::array();
    for (const auto& run : *record.stage_runs) runs.push_back(to_json(run));
    j["stage_runs"] = std::move(runs);
  }
  j["timestamp"] = record.timestamp;
  if (!record.fingerprint.empty()) j["fingerprint"] = record.fingerprint;
  return j;
}

ExecutionRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  ExecutionRecord record;
  record.context = context_from_json(require(j, "context"));
  record.scale_out = require_as<int>(j, "scale_out");
  record.runtime_s = require_as<double>(j, "runtime_s");
  if (auto it = j.find("stage_runs"); it != j.end() && !it->is_null()) {
    std::vector<StageRun> runs;
    for (const auto& item : *it) runs.push_back(stage_run_from_json(item));
    record.stage_runs = std::move(runs);
  }
  record.timestamp = j.value("timestamp", std::string{});
  for (const auto& [key, value] : j.items()) {
    if (!known_record_fields().contains(key)) record.unknown_fields.emplace(key, value.dump());
  }
  return finalize(std::move(record));
}

}  // namespace detail

std::string to_json_line(const ExecutionRecord& record) { return detail::to_json(record).dump(); }
std::string to_json_line(const MachineType& machine) { return detail::to_json(machine).dump(); }
std::string to_json_line(const ExecutionContext& context) { return detail::to_json(context).dump(); }

ExecutionRecord record_from_json_line(std::string_view line) {
  return detail::record_from_json(detail::parse_json(line, "record"));
}

MachineType machine_from_json_line(std::string_view line) {
  return detail::machine_from_json(detail::parse_json(line, "machine type"));
}

ExecutionContext context_from_json_text(std::string_view text) {
  return detail::context_from_json(detail::parse_json(text, "context"));
}

namespace {

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<ExecutionRecord> read_records(std::istream& in) {
  std::vector<ExecutionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_records(std::ostream& out, const std::vector<ExecutionRecord>& records) {
  for (const auto& record : records) out << to_json_line(record) << '\n';
}

Catalog read_catalog(std::istream& in) {
  Catalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      catalog.add(machine_from_json_line(line));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return catalog;
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
  for (const auto& machine : catalog) out << to_json_line(machine) << '\n';
}

std::vector<ExecutionRecord> load_records(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_records(in);
}

void save_records(const std::filesystem::path& path, const std::vector<ExecutionRecord>& records) {
  auto out = open_out(path);
  write_records(out, records);
}

Catalog load_catalog(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_catalog(in);
}

void save_catalog(const std::filesystem::path& path, const Catalog& catalog) {
  auto out = open_out(path);
  write_catalog(out, catalog);
}

}  // namespace colcfg
