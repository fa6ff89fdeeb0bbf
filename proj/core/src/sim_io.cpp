#include "colcfg/sim_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "colcfg/errors.hpp"
#include "json_util.hpp"

namespace colcfg {

using detail::json;

namespace {

json graph_to_json(const StageGraph& graph) {
  json stages = json::array();
  for (const auto& s : graph.stages) {
    stages.push_back({{"stage_id", s.stage_id}, {"features", s.features}, {"per_iteration", s.per_iteration}});
  }
  json edges = json::array();
  for (const auto& [a, b] : graph.edges) edges.push_back(json::array({a, b}));
  return {{"stages", stages}, {"edges", edges}, {"iterations", graph.iterations}};
}

StageGraph graph_from_json(const json& j) {
  StageGraph graph;
  for (const auto& s : j.at("stages")) {
    StageSpec stage;
    stage.stage_id = s.at("stage_id").get<std::string>();
    if (s.contains("features")) stage.features = s.at("features").get<std::map<std::string, double>>();
    stage.per_iteration = s.value("per_iteration", true);
    graph.stages.push_back(std::move(stage));
  }
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ValidationError("stage graph edges must be [before, after] pairs");
      graph.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  graph.iterations = j.at("iterations").get<int>();
  return graph;
}

json truth_to_json(const GroundTruthSpec& t) {
  json stages = json::object();
  for (const auto& [id, s] : t.stages) {
    stages[id] = {{"base_s", s.base_s}, {"work_s", s.work_s}, {"log_coef", s.log_coef}};
  }
  json anomalies = json::array();
  for (const auto& a : t.anomalies) {
    anomalies.push_back({{"iteration", a.iteration}, {"stage_id", a.stage_id}, {"factor", a.factor}});
  }
  json j = {{"stages", stages},
            {"data_gb", t.data_gb},
            {"noise_sigma", t.noise_sigma},
            {"anomalies", anomalies},
            {"overhead", {{"alpha", t.overhead.alpha}, {"beta", t.overhead.beta}, {"sigma", t.overhead.sigma}}}};
  if (t.random_anomalies) {
    const auto& r = *t.random_anomalies;
    j["random_anomalies"] = {{"rate", r.rate}, {"min_factor", r.min_factor}, {"max_factor", r.max_factor}};
  }
  return j;
}

GroundTruthSpec truth_from_json(const json& j) {
  GroundTruthSpec t;
  for (const auto& [id, s] : j.at("stages").items()) {
    t.stages[id] = StageTruth{s.at("base_s").get<double>(), s.value("work_s", 0.0), s.value("log_coef", 0.0)};
  }
  t.data_gb = j.at("data_gb").get<double>();
  t.noise_sigma = j.value("noise_sigma", 0.0);
  if (j.contains("anomalies")) {
    for (const auto& a : j.at("anomalies")) {
      t.anomalies.push_back({a.at("iteration").get<int>(), a.at("stage_id").get<std::string>(),
                             a.at("factor").get<double>()});
    }
  }
  if (j.contains("random_anomalies") && !j.at("random_anomalies").is_null()) {
    const auto& r = j.at("random_anomalies");
    RandomAnomalies ra;
    ra.rate = r.at("rate").get<double>();
    ra.min_factor = r.value("min_factor", ra.min_factor);
    ra.max_factor = r.value("max_factor", ra.max_factor);
    t.random_anomalies = ra;
  }
  if (j.contains("overhead")) {
    const auto& o = j.at("overhead");
    t.overhead.alpha = o.value("alpha", t.overhead.alpha);
    t.overhead.beta = o.value("beta", t.overhead.beta);
    t.overhead.sigma = o.value("sigma", t.overhead.sigma);
  }
  return t;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string sim_spec_to_json(const SimulationSpec& spec) {
  json j = {{"graph", graph_to_json(spec.graph)},
            {"ground_truth", truth_to_json(spec.truth)},
            {"target", {{"target_s", spec.target.target_s}, {"hard", spec.target.hard}}},
            {"bounds", {{"lo", spec.bounds.lo}, {"hi", spec.bounds.hi}, {"step", spec.bounds.step}}},
            {"initial_scale_out", spec.initial_scale_out},
            {"machine", spec.machine}};
  return j.dump(2) + "\n";
}

SimulationSpec sim_spec_from_json(std::string_view text) {
  SimulationSpec spec;
  try {
    const auto j = detail::parse_json(text, "simulation spec");
    spec.graph = graph_from_json(j.at("graph"));
    spec.truth = truth_from_json(j.at("ground_truth"));
    const auto& target = j.at("target");
    spec.target.target_s = target.at("target_s").get<double>();
    spec.target.hard = target.value("hard", false);
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      spec.bounds = ScaleOutRange{b.at("lo").get<int>(), b.at("hi").get<int>(), b.value("step", 1)};
    }
    spec.initial_scale_out = j.at("initial_scale_out").get<int>();
    spec.machine = j.value("machine", spec.machine);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed simulation spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SimulationSpec load_sim_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sim_spec_from_json(buffer.str());
}

void save_sim_spec(const std::filesystem::path& path, const SimulationSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << sim_spec_to_json(spec);
}

std::string trace_csv_rows(const SimResult& result, std::size_t run_id) {
  std::string out;
  for (const auto& e : result.trace) {
    out += std::to_string(run_id) + "," + std::to_string(e.run.iteration) + "," + e.run.stage_id + "," +
           std::to_string(e.run.scale_out) + "," + number(e.run.runtime_s) + "," +
           (e.run.anomalous ? "true" : "false") + "," + number(e.end_s) + "\n";
  }
  return out;
}

std::string trace_csv(std::span<const SimResult> results) {
  std::string out(kTraceHeader);
  out += "\n";
  for (std::size_t i = 0; i < results.size(); ++i) out += trace_csv_rows(results[i], i);
  return out;
}

}  // namespace colcfg
