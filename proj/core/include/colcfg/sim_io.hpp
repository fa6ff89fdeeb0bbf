#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "colcfg/simulator.hpp"

namespace colcfg {

// sim_spec.json: {"graph", "ground_truth", "target", "bounds",
// "initial_scale_out", "machine"}.
std::string sim_spec_to_json(const SimulationSpec& spec);
SimulationSpec sim_spec_from_json(std::string_view text);

SimulationSpec load_sim_spec(const std::filesystem::path& path);
void save_sim_spec(const std::filesystem::path& path, const SimulationSpec& spec);

inline constexpr std::string_view kTraceHeader = "run_id,iteration,stage_id,scale_out,runtime_s,anomalous,elapsed_s";

// Rows of one simulation, without the header; elapsed_s is the stage's
// completion time.
std::string trace_csv_rows(const SimResult& result, std::size_t run_id);

// Header plus the rows of results[i] labelled with run_id i.
std::string trace_csv(std::span<const SimResult> results);

}  // namespace colcfg
