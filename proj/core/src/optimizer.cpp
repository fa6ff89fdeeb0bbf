#include "colcfg/optimizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

#include "colcfg/errors.hpp"
#include "json_util.hpp"

namespace colcfg {

std::vector<int> ScaleOutRange::values() const {
  if (lo < 1 || hi < lo || step < 1) {
    throw ValidationError("scale-out range must satisfy 1 <= lo <= hi and step >= 1");
  }
  std::vector<int> out;
  for (int s = lo; s <= hi; s += step) out.push_back(s);
  return out;
}

ScaleOutRange ScaleOutRange::parse(std::string_view text) {
  std::vector<int> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(':', start), text.size());
    int value = 0;
    const auto piece = text.substr(start, end - start);
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty()) {
      throw ValidationError("bad scale-out range '" + std::string(text) + "', expected lo:hi:step");
    }
    parts.push_back(value);
    start = end + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw ValidationError("bad scale-out range '" + std::string(text) + "', expected lo:hi:step");
  }
  ScaleOutRange range{parts[0], parts[1], parts.size() == 3 ? parts[2] : 1};
  range.values();  // validates
  return range;
}

std::vector<CandidateConfig> enumerate_candidates(const Catalog& catalog, const ScaleOutRange& range) {
  if (catalog.empty()) throw ValidationError("cannot enumerate candidates over an empty catalog");
  const auto scale_outs = range.values();
  std::vector<CandidateConfig> out;
  out.reserve(catalog.size() * scale_outs.size());
  for (const auto& machine : catalog) {
    for (int s : scale_outs) out.push_back({machine.name, s});
  }
  return out;
}

double estimate_cost(const CandidateConfig& candidate, double predicted_runtime_s, const Catalog& catalog) {
  const auto& machine = catalog.at(candidate.machine);
  if (!(predicted_runtime_s > 0.0)) throw ValidationError("estimate_cost: runtime must be > 0");
  return machine.price_per_hour * static_cast<double>(candidate.scale_out) * predicted_runtime_s / 3600.0;
}

std::string_view to_string(Objective objective) {
  return objective == Objective::min_cost ? "min_cost" : "min_runtime";
}

Objective parse_objective(std::string_view text) {
  if (text == "min_cost") return Objective::min_cost;
  if (text == "min_runtime") return Objective::min_runtime;
  throw ValidationError("unknown objective '" + std::string(text) + "'");
}

namespace {

auto objective_key(const RankedCandidate& c, Objective objective) {
  const double primary = objective == Objective::min_cost ? c.predicted_cost : c.predicted_runtime_s;
  const double secondary = objective == Objective::min_cost ? c.predicted_runtime_s : c.predicted_cost;
  return std::make_tuple(primary, secondary, c.config.scale_out, c.catalog_index);
}

}  // namespace

Recommendation rank_candidates(std::vector<RankedCandidate> evaluated, const RuntimeTarget& target,
                               Objective objective) {
  if (evaluated.empty()) throw ValidationError("recommend: no candidates");
  if (!(target.target_s > 0.0)) throw ValidationError("runtime target must be > 0");
  for (auto& c : evaluated) c.feasible = c.predicted_runtime_s <= target.target_s;

  std::sort(evaluated.begin(), evaluated.end(), [&](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return objective_key(a, objective) < objective_key(b, objective);
  });

  Recommendation rec;
  rec.predicted_runtime_s = std::numeric_limits<double>::quiet_NaN();
  rec.predicted_cost = std::numeric_limits<double>::quiet_NaN();
  const RankedCandidate* chosen = nullptr;
  if (evaluated.front().feasible) {
    chosen = &evaluated.front();
  } else if (!target.hard) {
    chosen = &*std::min_element(evaluated.begin(), evaluated.end(), [](const auto& a, const auto& b) {
      return objective_key(a, Objective::min_runtime) < objective_key(b, Objective::min_runtime);
    });
  }
  if (chosen != nullptr) {
    rec.chosen = chosen->config;
    rec.predicted_runtime_s = chosen->predicted_runtime_s;
    rec.predicted_cost = chosen->predicted_cost;
    rec.feasible = chosen->feasible;
  }
  rec.ranking = std::move(evaluated);
  return rec;
}

Recommendation recommend(const TrainedModel& model, const ExecutionContext& context, double data_size_gb,
                         std::span<const CandidateConfig> candidates, const Catalog& catalog,
                         const RuntimeTarget& target, Objective objective) {
  if (candidates.empty()) throw ValidationError("recommend: no candidates");
  std::vector<RankedCandidate> evaluated;
  evaluated.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    RankedCandidate c;
    c.config = candidate;
    c.catalog_index = *catalog.index_of(catalog.at(candidate.machine).name);
    c.predicted_runtime_s = predict_runtime(model, context, candidate, data_size_gb);
    c.predicted_cost = estimate_cost(candidate, c.predicted_runtime_s, catalog);
    evaluated.push_back(std::move(c));
  }
  return rank_candidates(std::move(evaluated), target, objective);
}

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string ranking_csv(const Recommendation& recommendation) {
  std::string out = "machine,scale_out,predicted_runtime_s,predicted_cost,feasible\n";
  for (const auto& c : recommendation.ranking) {
    out += c.config.machine + "," + std::to_string(c.config.scale_out) + "," + number(c.predicted_runtime_s) + "," +
           number(c.predicted_cost) + "," + (c.feasible ? "true" : "false") + "\n";
  }
  return out;
}

std::string recommendation_report(const Recommendation& recommendation, const RuntimeTarget& target,
                                  Objective objective) {
  using detail::json;
  json j = {{"objective", std::string(to_string(objective))},
            {"target_s", target.target_s},
            {"hard", target.hard},
            {"feasible", recommendation.feasible},
            {"candidates", recommendation.ranking.size()}};
  if (recommendation.chosen) {
    j["chosen"] = {{"machine", recommendation.chosen->machine}, {"scale_out", recommendation.chosen->scale_out}};
    j["predicted_runtime_s"] = recommendation.predicted_runtime_s;
    j["predicted_cost"] = recommendation.predicted_cost;
  } else {
    j["chosen"] = nullptr;
    j["predicted_runtime_s"] = nullptr;
    j["predicted_cost"] = nullptr;
  }
  return j.dump();
}

}  // namespace colcfg
