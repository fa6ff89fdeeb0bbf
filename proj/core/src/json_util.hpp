#pragma once

#include <string>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

#include "colcfg/types.hpp"

namespace colcfg::detail {

using json = nlohmann::json;

// Compact dump with sorted keys and reals printed with 12 significant digits.
std::string canonical_dump(const json& value);

json to_json(const MachineType& machine);
MachineType machine_from_json(const json& j);

json to_json(const ExecutionContext& context);
ExecutionContext context_from_json(const json& j);

json to_json(const StageRun& run);
StageRun stage_run_from_json(const json& j);

json to_json(const ExecutionRecord& record);
ExecutionRecord record_from_json(const json& j);

json parse_json(std::string_view text, std::string_view what);

}  // namespace colcfg::detail
