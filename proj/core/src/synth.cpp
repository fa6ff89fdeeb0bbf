#include "colcfg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "colcfg/errors.hpp"
#include "colcfg/hash.hpp"
#include "colcfg/similarity.hpp"

namespace colcfg {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double normal(std::mt19937_64& rng) {
  double u1 = unit(rng);
  while (u1 <= 0.0) u1 = unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * unit(rng));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * unit(rng));
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[rng() % items.size()];
}

std::uint64_t gb_to_bytes(double gb) { return static_cast<std::uint64_t>(std::llround(gb * 1e9)); }

double param(const ExecutionContext& ctx, const std::string& key, double fallback) {
  auto it = ctx.job.params.find(key);
  if (it == ctx.job.params.end()) return fallback;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  return fallback;
}

std::string timestamp(std::uint64_t offset_s) {
  const auto day = 1 + (offset_s / 86400) % 28;
  const auto rem = offset_s % 86400;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "2025-03-%02lluT%02llu:%02llu:%02lluZ", static_cast<unsigned long long>(day),
                static_cast<unsigned long long>(rem / 3600), static_cast<unsigned long long>(rem / 60 % 60),
                static_cast<unsigned long long>(rem % 60));
  return buf;
}

ExecutionRecord make_record(ExecutionContext ctx, int scale_out, const Catalog& catalog, double sigma,
                            std::mt19937_64& rng) {
  ExecutionRecord r;
  r.scale_out = scale_out;
  r.runtime_s = planted_runtime(ctx, scale_out, catalog) * std::exp(sigma * normal(rng));
  r.context = std::move(ctx);
  r.timestamp = timestamp(rng() % (28ULL * 86400ULL));
  return finalize(std::move(r));
}

struct AlgorithmTruth {
  const char* name;
  double base_s;
  double slope;
  const char* param;
  double param_ref;  // slope scales with sqrt(param / param_ref)
  std::vector<double> param_values;
};

const std::vector<AlgorithmTruth>& algorithms() {
  static const std::vector<AlgorithmTruth> table = {
      {"kmeans", 20.0, 100.0, "k", 10.0, {2, 5, 10, 20, 50, 100}},
      {"pagerank", 15.0, 60.0, "iterations", 10.0, {5, 10, 20, 40}},
      {"sgd", 10.0, 40.0, "iterations", 100.0, {50, 100, 200, 400}},
      {"als", 25.0, 80.0, "rank", 10.0, {5, 10, 20, 50}},
      {"bayes", 12.0, 30.0, "classes", 2.0, {2, 5, 10}},
      {"sort", 8.0, 20.0, "", 1.0, {}},
      {"grep", 5.0, 8.0, "", 1.0, {}},
      {"wordcount", 6.0, 12.0, "", 1.0, {}},
  };
  return table;
}

const AlgorithmTruth* find_algorithm(const std::string& name) {
  for (const auto& a : algorithms()) {
    if (name == a.name) return &a;
  }
  return nullptr;
}

}  // namespace

Catalog standard_catalog() {
  Catalog catalog;
  const struct {
    const char* family;
    MachineCategory category;
    double memory_per_vcpu;
    double price_per_vcpu;
  } families[] = {{"c5", MachineCategory::c, 2.0, 0.0425},
                  {"m5", MachineCategory::m, 4.0, 0.048},
                  {"r5", MachineCategory::r, 8.0, 0.063}};
  const struct {
    const char* size;
    int vcpus;
  } sizes[] = {{"large", 2}, {"xlarge", 4}, {"2xlarge", 8}};
  for (const auto& f : families) {
    for (const auto& s : sizes) {
      catalog.add({std::string(f.family) + "." + s.size, f.category, s.vcpus, f.memory_per_vcpu * s.vcpus,
                   f.price_per_vcpu * s.vcpus});
    }
  }
  return catalog;
}

double planted_slope(const ExecutionContext& context, const Catalog& catalog) {
  const auto* alg = find_algorithm(context.job.algorithm);
  double slope = alg ? alg->slope : 50.0;
  if (alg && alg->param[0] != '\0') slope *= std::sqrt(param(context, alg->param, alg->param_ref) / alg->param_ref);

  const auto& machine = catalog.at(context.machine);
  double category = 1.0;
  if (machine.category == MachineCategory::c) category = 0.85;
  if (machine.category == MachineCategory::r) category = 1.1;
  slope *= std::pow(4.0 / machine.vcpus, 0.7) * category;

  if (context.origin != "local-lab" && !context.origin.empty()) {
    const double u = static_cast<double>(fnv1a64(context.origin) >> 11) * 0x1.0p-53;
    slope *= 0.6 + 0.9 * u;
  }
  return slope;
}

double planted_runtime(const ExecutionContext& context, int scale_out, const Catalog& catalog) {
  if (scale_out < 1) throw ValidationError("scale_out must be >= 1");
  const auto* alg = find_algorithm(context.job.algorithm);
  const double base = alg ? alg->base_s : 10.0;
  const double s = scale_out;
  return base + planted_slope(context, catalog) * context.dataset.size_gb() / s + 4.0 * std::log2(s);
}

std::vector<ExecutionRecord> generate_repository(std::size_t count, std::uint64_t seed, const Catalog& catalog,
                                                 double noise_sigma) {
  if (catalog.empty()) throw ValidationError("generate_repository: empty catalog");
  std::mt19937_64 rng(seed);
  const std::vector<std::string> origins = {"local-lab", "lab-a", "lab-b", "lab-c", "cloud-x", "cloud-y"};
  std::vector<std::string> machines;
  for (const auto& m : catalog) machines.push_back(m.name);

  std::vector<ExecutionRecord> out;
  std::set<std::string> seen;
  while (out.size() < count) {
    const auto& alg = algorithms()[rng() % algorithms().size()];
    ExecutionContext ctx;
    ctx.job.algorithm = alg.name;
    if (!alg.param_values.empty()) ctx.job.params[alg.param] = pick(rng, alg.param_values);
    ctx.dataset.size_bytes = gb_to_bytes(log_uniform(rng, 1.0, 200.0));
    ctx.machine = pick(rng, machines);
    ctx.origin = pick(rng, origins);
    ctx.sys_config["spark.executor.cores"] = catalog.at(ctx.machine).vcpus;
    auto record = make_record(std::move(ctx), uniform_int(rng, 2, 48), catalog, noise_sigma, rng);
    if (seen.insert(record.fingerprint).second) out.push_back(std::move(record));
  }
  return out;
}

double two_population_slope(const ExecutionContext& context, const ExecutionContext& reference,
                             const Catalog& catalog) {
  auto ref = reference;
  ref.dataset = context.dataset;  // data size enters through d/s, not the slope
  return 100.0 + 400.0 * (1.0 - context_similarity(context, ref, SimilarityWeights{}, catalog));
}

TwoPopulation generate_two_population(const PopulationOptions& options, std::uint64_t seed) {
  TwoPopulation pop;
  pop.catalog = standard_catalog();
  std::mt19937_64 rng(seed);

  const std::string local_machine = options.far_global ? "c5.large" : "m5.xlarge";
  pop.query.job.algorithm = "kmeans";
  pop.query.job.params["k"] = 10.0;
  pop.query.dataset.size_bytes = gb_to_bytes(20.0);
  pop.query.machine = local_machine;
  pop.query.origin = options.local_origin;

  auto make = [&](ExecutionContext ctx, int scale_out) {
    const double s = scale_out;
    const double clean = 20.0 + two_population_slope(ctx, pop.query, pop.catalog) * ctx.dataset.size_gb() / s +
                         4.0 * std::log2(s);
    ExecutionRecord r;
    r.scale_out = scale_out;
    r.runtime_s = clean * std::exp(options.noise_sigma * normal(rng));
    r.context = std::move(ctx);
    r.timestamp = timestamp(rng() % (28ULL * 86400ULL));
    return finalize(std::move(r));
  };
  auto local_record = [&] {
    auto ctx = pop.query;
    ctx.dataset.size_bytes = gb_to_bytes(log_uniform(rng, 5.0, 80.0));
    return make(std::move(ctx), uniform_int(rng, 2, 40));
  };

  const std::vector<std::string> origins = {"lab-a", "lab-b", "lab-c", "lab-d", "cloud-x", "cloud-y"};
  std::vector<std::string> machines;
  for (const auto& m : pop.catalog) machines.push_back(m.name);
  const std::vector<double> ks = {2, 5, 10, 20, 50, 100};

  for (std::size_t i = 0; i < options.global_records; ++i) {
    ExecutionContext ctx;
    ctx.origin = pick(rng, origins);
    if (options.far_global) {
      ctx.job.algorithm = "sgd";
      ctx.job.params["iterations"] = pick(rng, algorithms()[2].param_values);
      ctx.machine = "r5.2xlarge";
      ctx.dataset.size_bytes = gb_to_bytes(log_uniform(rng, 2e-6, 1e-5));
    } else {
      ctx.job.algorithm = "kmeans";
      ctx.job.params["k"] = pick(rng, ks);
      ctx.machine = pick(rng, machines);
      ctx.dataset.size_bytes = gb_to_bytes(log_uniform(rng, 1.0, 200.0));
    }
    const int s = uniform_int(rng, 2, 40);
    pop.global.push_back(make(std::move(ctx), s));
  }
  for (std::size_t i = 0; i < options.local_records; ++i) pop.local.push_back(local_record());
  for (std::size_t i = 0; i < options.holdout_records; ++i) pop.holdout.push_back(local_record());
  return pop;
}

std::vector<ExecutionRecord> planted_scale_out_records(const ScaleOutFeatures& theta, const std::vector<int>& scale_outs,
                                                    double data_gb, double noise_sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ExecutionRecord> out;
  for (int s : scale_outs) {
    ExecutionRecord r;
    r.context.job.algorithm = "planted";
    r.context.dataset.size_bytes = gb_to_bytes(data_gb);
    r.context.machine = "m5.xlarge";
    r.context.origin = "local-lab";
    r.scale_out = s;
    const double clean = dot(theta, featurize(s, r.context.dataset.size_gb()));
    r.runtime_s = clean * (noise_sigma > 0.0 ? std::exp(noise_sigma * normal(rng)) : 1.0);
    out.push_back(finalize(std::move(r)));
  }
  return out;
}

SimulationSpec generate_sim_spec(const SimSpecOptions& options, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SimulationSpec spec;
  spec.bounds = options.bounds;
  spec.initial_scale_out = options.initial_scale_out;
  spec.machine = "m5.xlarge";

  struct Proto {
    const char* id;
    bool per_iteration;
  };
  const Proto protos[] = {{"load", false}, {"map", true}, {"shuffle", true}, {"side", true}, {"reduce", true}};
  for (const auto& p : protos) {
    StageSpec stage;
    stage.stage_id = p.id;
    stage.per_iteration = p.per_iteration;
    stage.features["input_share"] = std::round(100.0 * (0.2 + 0.8 * unit(rng))) / 100.0;
    stage.features["shuffle_share"] = std::round(100.0 * unit(rng)) / 100.0;
    spec.graph.stages.push_back(std::move(stage));
  }
  spec.graph.edges = {{"load", "map"}, {"map", "shuffle"}, {"map", "side"}, {"shuffle", "reduce"}, {"side", "reduce"}};
  spec.graph.iterations = options.iterations;

  spec.truth.data_gb = std::round(log_uniform(rng, 10.0, 40.0));
  spec.truth.noise_sigma = options.noise_sigma;
  for (const auto& stage : spec.graph.stages) {
    const double a = stage.features.at("input_share");
    const double b = stage.features.at("shuffle_share");
    spec.truth.stages[stage.stage_id] = StageTruth{1.0 + 3.0 * b, 8.0 * a + 4.0 * b, 0.5 * b};
  }
  if (options.anomaly_rate > 0.0) spec.truth.random_anomalies = RandomAnomalies{options.anomaly_rate, 2.5, 4.0};
  spec.truth.overhead = OverheadTruth{20.0, 1.5, 0.1};

  double total = 0.0;
  for (int it = 0; it < spec.graph.iterations; ++it) {
    const auto active = spec.graph.active_in(it);
    std::vector<double> durations;
    for (const auto& stage : spec.graph.stages) {
      durations.push_back(spec.truth.expected_runtime(stage.stage_id, spec.initial_scale_out));
    }
    total += critical_path(spec.graph, durations, active);
  }
  spec.target = RuntimeTarget{std::max(1.0, options.target_slack * total), false};
  spec.validate();
  return spec;
}

}  // namespace colcfg
