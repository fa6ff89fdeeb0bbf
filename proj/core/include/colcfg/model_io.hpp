#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "colcfg/models.hpp"

namespace colcfg {

inline constexpr int kModelFormatVersion = 1;

// One JSON object per line: format tag, version, kind, params,
// training_fingerprint, val_error. Doubles round-trip bit-exactly.
std::string model_to_json_line(const TrainedModel& model);
TrainedModel model_from_json_line(std::string_view line);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace colcfg
