#include "colcfg/errors.hpp"

namespace colcfg {

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& name : names) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

}  // namespace

MergeConflictError::MergeConflictError(std::vector<std::string> names)
    : ValidationError("catalog merge conflict for machine types: " + join_names(names)), names_(std::move(names)) {}

}  // namespace colcfg
