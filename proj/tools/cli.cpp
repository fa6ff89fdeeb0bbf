#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "colcfg/errors.hpp"
#include "colcfg/jsonl.hpp"
#include "colcfg/model_io.hpp"
#include "colcfg/models.hpp"
#include "colcfg/optimizer.hpp"
#include "colcfg/reduction.hpp"
#include "colcfg/repository.hpp"
#include "colcfg/sim_io.hpp"
#include "colcfg/similarity.hpp"
#include "colcfg/simulator.hpp"
#include "colcfg/synth.hpp"

namespace colcfg::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Globals {
  std::string repo;
  std::string catalog;
  std::string origin;
  std::string out;
  std::string model = "auto";
  std::string objective = "min_cost";
  std::string scale_outs = "4:36:4";
  std::optional<double> target_s;
  std::uint64_t seed = 42;
  SimilarityWeights weights;
};

// Either the --out file or the primary stream.
void emit(const Globals& g, std::ostream& out, const std::string& text) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw ValidationError("cannot write " + g.out);
  file << text;
}

std::string records_text(const std::vector<ExecutionRecord>& records) {
  std::ostringstream s;
  write_records(s, records);
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot write " + path);
  file << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string& require(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing required option ") + flag);
  return value;
}

Catalog require_catalog(const Globals& g) { return load_catalog(require(g.catalog, "--catalog")); }

std::optional<Catalog> optional_catalog(const Globals& g) {
  if (g.catalog.empty()) return std::nullopt;
  return load_catalog(g.catalog);
}

std::vector<ExecutionRecord> filter_records(std::vector<ExecutionRecord> records, const RecordFilter& filter) {
  std::erase_if(records, [&](const ExecutionRecord& r) { return !filter(r); });
  return records;
}

json metrics_json(const ErrorMetrics& m) { return {{"mape", m.mape}, {"mae", m.mae}}; }

ModelKind kind_or(const std::string& text, ModelKind fallback) {
  return text == "auto" ? fallback : parse_model_kind(text);
}

// --- import ---------------------------------------------------------------

struct ImportArgs {
  std::vector<std::string> files;
};

void cmd_import(const Globals& g, const ImportArgs& a, std::ostream& out) {
  auto catalog = require_catalog(g);
  Repository repo(catalog);
  if (!g.repo.empty() && fs::exists(g.repo)) repo = make_repository(catalog, load_records(g.repo));
  std::size_t inserted = 0;
  std::size_t duplicates = 0;
  for (const auto& file : a.files) {
    for (auto& record : load_records(file)) {
      if (record.context.origin.empty()) record.context.origin = g.origin;
      auto result = append_record(std::move(repo), std::move(record));
      repo = std::move(result.repo);
      (result.inserted ? inserted : duplicates) += 1;
    }
  }
  const std::string target = g.out.empty() ? require(g.repo, "--repo or --out") : g.out;
  write_text(target, records_text(repo.record_list()));
  out << json{{"inserted", inserted}, {"duplicates", duplicates}, {"records", repo.size()}}.dump() << "\n";
}

// --- merge ----------------------------------------------------------------

struct MergeArgs {
  std::vector<std::string> files;
};

void cmd_merge(const Globals& g, const MergeArgs& a, std::ostream& out) {
  std::vector<ExecutionRecord> all;
  for (const auto& file : a.files) {
    auto records = load_records(file);
    all.insert(all.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
  }
  std::vector<ExecutionRecord> merged;
  if (auto catalog = optional_catalog(g)) {
    merged = make_repository(*catalog, all).record_list();
  } else {
    merged = union_records(all);
  }
  emit(g, out, records_text(merged));
  if (!g.out.empty()) out << json{{"records", merged.size()}}.dump() << "\n";
}

// --- reduce ---------------------------------------------------------------

struct ReduceArgs {
  std::size_t budget = 0;
  std::size_t stride = 5;
  std::size_t folds = 5;
  std::string algorithm;
  std::string query;
};

void cmd_reduce(const Globals& g, const ReduceArgs& a, std::ostream& out) {
  RecordFilter filter;
  if (!a.algorithm.empty()) filter.algorithm = a.algorithm;
  const auto records = filter_records(load_records(require(g.repo, "--repo")), filter);

  std::optional<Catalog> catalog = optional_catalog(g);
  ReductionOptions options;
  options.eval.kind = kind_or(g.model, ModelKind::parametric_nnls);
  options.eval.catalog = catalog ? &*catalog : nullptr;
  options.eval.similarity.weights = g.weights;
  options.eval.neural.seed = g.seed;
  if (!a.query.empty()) options.eval.query = context_from_json_text(read_text(a.query));
  options.stride = a.stride;
  options.folds = a.folds;
  options.seed = g.seed;

  const double before = reduction_score(records, options);
  const auto reduced = reduce_training_data(records, a.budget, options);
  const double after = reduction_score(reduced, options);
  emit(g, out, records_text(reduced));
  if (!g.out.empty()) {
    out << json{{"input", records.size()}, {"kept", reduced.size()}, {"cv_mape_before", before},
                {"cv_mape_after", after}}
               .dump()
        << "\n";
  }
}

// --- train ----------------------------------------------------------------

struct TrainArgs {
  std::string query;
  std::string algorithm;
  std::size_t folds = 5;
};

void cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out) {
  RecordFilter filter;
  if (!a.algorithm.empty()) filter.algorithm = a.algorithm;
  const auto records = filter_records(load_records(require(g.repo, "--repo")), filter);
  std::optional<ExecutionContext> query;
  if (!a.query.empty()) query = context_from_json_text(read_text(a.query));
  if (query && !g.origin.empty()) query->origin = g.origin;
  std::optional<Catalog> catalog = optional_catalog(g);

  TrainedModel model;
  json report = json::array();
  if (g.model == "auto") {
    if (!query) throw ValidationError("--model auto needs --query");
    if (!catalog) throw ValidationError("--model auto needs --catalog");
    SelectionOptions options;
    options.folds = a.folds;
    options.seed = g.seed;
    options.similarity.weights = g.weights;
    options.neural.seed = g.seed;
    const ModelKind kinds[] = {ModelKind::parametric_nnls, ModelKind::similarity_weighted, ModelKind::neural};
    auto selection = select_model(records, *query, *catalog, kinds, options);
    model = std::move(selection.model);
    for (const auto& r : selection.report) {
      json entry = {{"kind", std::string(to_string(r.kind))}};
      if (r.cv_error) {
        entry["cv_error"] = metrics_json(*r.cv_error);
      } else {
        entry["skipped"] = r.skip_reason;
      }
      report.push_back(entry);
    }
  } else {
    ModelSpec spec;
    spec.kind = parse_model_kind(g.model);
    spec.query = query;
    spec.catalog = catalog ? &*catalog : nullptr;
    spec.similarity.weights = g.weights;
    spec.neural.seed = g.seed;
    model = fit_model(records, spec);
    if (records.size() >= a.folds) {
      try {
        model.val_error = cross_validate(records, spec, a.folds, g.seed);
      } catch (const ValidationError& e) {
        report.push_back({{"kind", std::string(to_string(spec.kind))}, {"cv_skipped", e.what()}});
      }
    }
  }
  const auto line = model_to_json_line(model) + "\n";
  emit(g, out, line);
  if (!g.out.empty()) {
    out << json{{"kind", std::string(to_string(model.kind))},
                {"training_records", records.size()},
                {"training_fingerprint", model.training_fingerprint},
                {"val_error", metrics_json(model.val_error)},
                {"report", report}}
               .dump()
        << "\n";
  }
}

// --- evaluate ---------------------------------------------------------------

struct ModelFileArgs {
  std::string model_file;
  std::string holdout;
  std::string query;
  std::string algorithm;
  std::string machine;
  bool hard = false;
};

void cmd_evaluate(const Globals& g, const ModelFileArgs& a, std::ostream& out) {
  const auto model = load_model(a.model_file);
  RecordFilter filter;
  if (!a.algorithm.empty()) filter.algorithm = a.algorithm;
  const auto holdout = filter_records(load_records(a.holdout.empty() ? require(g.repo, "--repo") : a.holdout), filter);
  const auto metrics = evaluate(model, holdout);
  auto j = metrics_json(metrics);
  j["records"] = holdout.size();
  emit(g, out, j.dump() + "\n");
}

// --- predict ----------------------------------------------------------------

void cmd_predict(const Globals& g, const ModelFileArgs& a, std::ostream& out) {
  const auto model = load_model(a.model_file);
  const auto query = context_from_json_text(read_text(require(a.query, "--query")));
  const std::string machine = a.machine.empty() ? query.machine : a.machine;
  std::string csv = "machine,scale_out,predicted_runtime_s\n";
  char buf[64];
  for (int s : ScaleOutRange::parse(g.scale_outs).values()) {
    const double t = predict_runtime(model, query, {machine, s}, query.dataset.size_gb());
    std::snprintf(buf, sizeof(buf), "%.10g", t);
    csv += machine + "," + std::to_string(s) + "," + buf + "\n";
  }
  emit(g, out, csv);
}

// --- recommend --------------------------------------------------------------

void cmd_recommend(const Globals& g, const ModelFileArgs& a, std::ostream& out) {
  const auto model = load_model(a.model_file);
  const auto catalog = require_catalog(g);
  const auto query = context_from_json_text(read_text(require(a.query, "--query")));
  if (!g.target_s) throw ValidationError("missing required option --target-s");
  const RuntimeTarget target{*g.target_s, a.hard};
  const auto objective = parse_objective(g.objective);
  const auto candidates = enumerate_candidates(catalog, ScaleOutRange::parse(g.scale_outs));
  const auto rec = recommend(model, query, query.dataset.size_gb(), candidates, catalog, target, objective);
  emit(g, out, ranking_csv(rec));
  if (!g.out.empty()) out << recommendation_report(rec, target, objective) << "\n";
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string spec;
  std::string controller = "dynamic";
  std::string scope = "per_stage";
  int runs = 65;
  int threads = 1;
};

void cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
  auto spec = load_sim_spec(a.spec);
  if (g.target_s) spec.target.target_s = *g.target_s;
  if (a.runs < 0) throw ValidationError("--runs must be >= 0");
  if (a.threads < 1) throw ValidationError("--threads must be >= 1");
  Controller controller;
  controller.kind = parse_controller_kind(a.controller);
  controller.model.scope = parse_model_scope(a.scope);
  controller.model.kind = kind_or(g.model, ModelKind::parametric_nnls);
  controller.model.neural.seed = g.seed;
  spec.validate();

  // Run i uses seed + i; results land in slot i whatever thread ran them.
  std::vector<SimResult> results(static_cast<std::size_t>(a.runs));
  std::vector<std::string> errors(results.size());
  auto worker = [&](std::size_t first) {
    for (std::size_t i = first; i < results.size(); i += static_cast<std::size_t>(a.threads)) {
      try {
        results[i] = simulate(spec, controller, g.seed + i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < a.threads; ++t) pool.emplace_back(worker, static_cast<std::size_t>(t));
  worker(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw ValidationError(e);
  }

  emit(g, out, trace_csv(results));
  if (!g.out.empty()) {
    std::size_t met = 0;
    std::size_t rescales = 0;
    double elapsed = 0.0;
    for (const auto& r : results) {
      met += r.met_target ? 1 : 0;
      rescales += r.final_state.rescales.size();
      elapsed += r.final_state.elapsed_s;
    }
    out << json{{"runs", results.size()},
                {"controller", std::string(to_string(controller.kind))},
                {"target_s", spec.target.target_s},
                {"met_target", met},
                {"rescales", rescales},
                {"mean_elapsed_s", results.empty() ? 0.0 : elapsed / static_cast<double>(results.size())}}
               .dump()
        << "\n";
  }
}

// --- gen ------------------------------------------------------------------

struct GenArgs {
  std::string kind = "repo";
  std::size_t jobs = 930;
  std::string holdout_out;
  std::string query_out;
  std::size_t global_records = 400;
  std::size_t local_records = 40;
  std::size_t holdout_records = 40;
  int iterations = 20;
  double anomaly_rate = 0.05;
  double noise = 0.05;
  double target_slack = 1.1;
  int initial_scale_out = 8;
};

void cmd_gen(const Globals& g, const GenArgs& a, std::ostream& out) {
  const auto catalog = standard_catalog();
  auto write_catalog_if_asked = [&] {
    if (g.catalog.empty()) return;
    std::ostringstream s;
    write_catalog(s, catalog);
    write_text(g.catalog, s.str());
  };
  if (a.kind == "repo") {
    write_catalog_if_asked();
    emit(g, out, records_text(generate_repository(a.jobs, g.seed, catalog, a.noise)));
  } else if (a.kind == "catalog") {
    std::ostringstream s;
    write_catalog(s, catalog);
    emit(g, out, s.str());
  } else if (a.kind == "two-population") {
    write_catalog_if_asked();
    PopulationOptions options;
    options.global_records = a.global_records;
    options.local_records = a.local_records;
    options.holdout_records = a.holdout_records;
    options.noise_sigma = a.noise;
    if (!g.origin.empty()) options.local_origin = g.origin;
    auto pop = generate_two_population(options, g.seed);
    auto training = pop.global;
    training.insert(training.end(), pop.local.begin(), pop.local.end());
    emit(g, out, records_text(training));
    if (!a.holdout_out.empty()) write_text(a.holdout_out, records_text(pop.holdout));
    if (!a.query_out.empty()) write_text(a.query_out, to_json_line(pop.query) + "\n");
  } else if (a.kind == "sim-spec") {
    SimSpecOptions options;
    options.iterations = a.iterations;
    options.noise_sigma = a.noise;
    options.anomaly_rate = a.anomaly_rate;
    options.target_slack = a.target_slack;
    options.initial_scale_out = a.initial_scale_out;
    options.bounds = ScaleOutRange::parse(g.scale_outs);
    emit(g, out, sim_spec_to_json(generate_sim_spec(options, g.seed)));
  } else {
    throw ValidationError("unknown gen kind '" + a.kind + "' (repo, catalog, two-population, sim-spec)");
  }
}

// --- report ---------------------------------------------------------------

struct ReportArgs {
  std::string algorithm;
  std::string machine;
  std::size_t groups = 0;
};

void cmd_report(const Globals& g, const ReportArgs& a, std::ostream& out) {
  std::optional<Catalog> catalog = optional_catalog(g);
  std::vector<ExecutionRecord> loaded = load_records(require(g.repo, "--repo"));
  const auto all = catalog ? make_repository(*catalog, loaded).record_list() : union_records(loaded);
  RecordFilter filter;
  if (!a.algorithm.empty()) filter.algorithm = a.algorithm;
  if (!a.machine.empty()) filter.machine = a.machine;
  if (!g.origin.empty()) filter.origin = g.origin;
  const auto records = filter_records(all, filter);

  std::map<std::string, std::size_t> algorithms, origins, machines;
  int min_s = std::numeric_limits<int>::max();
  int max_s = 0;
  double total = 0.0;
  for (const auto& r : records) {
    ++algorithms[r.context.job.algorithm];
    ++origins[r.context.origin];
    ++machines[r.context.machine];
    min_s = std::min(min_s, r.scale_out);
    max_s = std::max(max_s, r.scale_out);
    total += r.runtime_s;
  }
  json j = {{"records", records.size()}, {"algorithms", algorithms}, {"origins", origins}, {"machines", machines}};
  if (!records.empty()) {
    j["scale_out"] = {{"min", min_s}, {"max", max_s}};
    j["mean_runtime_s"] = total / static_cast<double>(records.size());
  }
  if (a.groups > 0) {
    if (!catalog) throw ValidationError("--groups needs --catalog");
    json groups = json::array();
    for (const auto& group : group_resources(*catalog, a.groups, g.seed)) groups.push_back(group.members);
    j["machine_groups"] = groups;
  }
  emit(g, out, j.dump(2) + "\n");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collaborative cluster configuration: shared runtime data, models, recommendations, simulation",
               "colcfg"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--repo", g.repo, "Record repository (JSON lines)");
  app.add_option("--catalog", g.catalog, "Machine catalog (JSON lines)");
  app.add_option("--origin", g.origin, "Origin label of the local environment");
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", g.out, "Output file (stdout when omitted)");
  app.add_option("--model", g.model, "Model kind")
      ->check(CLI::IsMember({"parametric", "parametric_nnls", "similarity", "similarity_weighted", "neural", "auto"}))
      ->capture_default_str();
  app.add_option("--target-s", g.target_s, "Runtime target in seconds");
  app.add_option("--objective", g.objective, "Recommendation objective")
      ->check(CLI::IsMember({"min_cost", "min_runtime"}))
      ->capture_default_str();
  app.add_option("--scale-outs", g.scale_outs, "Scale-out range lo:hi:step")->capture_default_str();
  app.add_option("--w-job", g.weights.w_job, "Similarity weight of the job signature")->capture_default_str();
  app.add_option("--w-dataset", g.weights.w_dataset, "Similarity weight of the dataset")->capture_default_str();
  app.add_option("--w-machine", g.weights.w_machine, "Similarity weight of the machine type")->capture_default_str();
  app.add_option("--local-boost", g.weights.local_boost, "Weight multiplier for local records")
      ->capture_default_str();

  ImportArgs import_args;
  auto* import_cmd = app.add_subcommand("import", "Append record files to a repository");
  import_cmd->add_option("files", import_args.files, "Record files")->required()->check(CLI::ExistingFile);

  MergeArgs merge_args;
  auto* merge_cmd = app.add_subcommand("merge", "Union record files by fingerprint");
  merge_cmd->add_option("files", merge_args.files, "Record files")->required()->check(CLI::ExistingFile);

  ReduceArgs reduce_args;
  auto* reduce_cmd = app.add_subcommand("reduce", "Shrink a training set while keeping CV accuracy");
  reduce_cmd->add_option("--budget", reduce_args.budget, "Records to keep")->required();
  reduce_cmd->add_option("--stride", reduce_args.stride, "Removals between re-scoring")->capture_default_str();
  reduce_cmd->add_option("--folds", reduce_args.folds, "Cross-validation folds")->capture_default_str();
  reduce_cmd->add_option("--algorithm", reduce_args.algorithm, "Only records of this algorithm");
  reduce_cmd->add_option("--query", reduce_args.query, "Query context JSON (similarity/neural)")
      ->check(CLI::ExistingFile);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Fit or select a runtime model");
  train_cmd->add_option("--query", train_args.query, "Query context JSON")->check(CLI::ExistingFile);
  train_cmd->add_option("--algorithm", train_args.algorithm, "Only records of this algorithm");
  train_cmd->add_option("--folds", train_args.folds, "Cross-validation folds")->capture_default_str();

  ModelFileArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "MAPE and MAE of a model on held-out records");
  evaluate_cmd->add_option("--model-file", evaluate_args.model_file, "Trained model")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--holdout", evaluate_args.holdout, "Held-out records (default --repo)")
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--algorithm", evaluate_args.algorithm, "Only records of this algorithm");

  ModelFileArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Predicted runtimes over a scale-out range");
  predict_cmd->add_option("--model-file", predict_args.model_file, "Trained model")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--query", predict_args.query, "Query context JSON")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--machine", predict_args.machine, "Machine type (default: the query's)");

  ModelFileArgs recommend_args;
  auto* recommend_cmd = app.add_subcommand("recommend", "Rank machine type x scale-out candidates");
  recommend_cmd->add_option("--model-file", recommend_args.model_file, "Trained model")
      ->required()
      ->check(CLI::ExistingFile);
  recommend_cmd->add_option("--query", recommend_args.query, "Query context JSON")
      ->required()
      ->check(CLI::ExistingFile);
  recommend_cmd->add_flag("--hard", recommend_args.hard, "No fallback when nothing meets the target");

  SimulateArgs simulate_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run seeded simulations of an iterative job");
  simulate_cmd->add_option("--spec", simulate_args.spec, "Simulation spec JSON")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--controller", simulate_args.controller, "Rescaling policy")
      ->check(CLI::IsMember({"static", "dynamic"}))
      ->capture_default_str();
  simulate_cmd->add_option("--scope", simulate_args.scope, "Stage model scope")
      ->check(CLI::IsMember({"per_stage", "global"}))
      ->capture_default_str();
  simulate_cmd->add_option("--runs", simulate_args.runs, "Number of seeded runs")->capture_default_str();
  simulate_cmd->add_option("--threads", simulate_args.threads, "Worker threads")->capture_default_str();

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Synthetic repositories, catalogs and simulation specs");
  gen_cmd->add_option("--kind", gen_args.kind, "repo, catalog, two-population or sim-spec")
      ->check(CLI::IsMember({"repo", "catalog", "two-population", "sim-spec"}))
      ->capture_default_str();
  gen_cmd->add_option("--jobs", gen_args.jobs, "Records in a generated repo")->capture_default_str();
  gen_cmd->add_option("--holdout-out", gen_args.holdout_out, "two-population: holdout records file");
  gen_cmd->add_option("--query-out", gen_args.query_out, "two-population: query context file");
  gen_cmd->add_option("--global", gen_args.global_records, "two-population: global records")->capture_default_str();
  gen_cmd->add_option("--local", gen_args.local_records, "two-population: local records")->capture_default_str();
  gen_cmd->add_option("--holdout", gen_args.holdout_records, "two-population: holdout records")
      ->capture_default_str();
  gen_cmd->add_option("--iterations", gen_args.iterations, "sim-spec: iterations")->capture_default_str();
  gen_cmd->add_option("--anomaly-rate", gen_args.anomaly_rate, "sim-spec: slowdown probability per stage run")
      ->capture_default_str();
  gen_cmd->add_option("--noise", gen_args.noise, "Lognormal runtime noise sigma")->capture_default_str();
  gen_cmd->add_option("--target-slack", gen_args.target_slack, "sim-spec: target over anomaly-free runtime")
      ->capture_default_str();
  gen_cmd->add_option("--initial-scale-out", gen_args.initial_scale_out, "sim-spec: starting scale-out")
      ->capture_default_str();

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Summarize a repository");
  report_cmd->add_option("--algorithm", report_args.algorithm, "Only records of this algorithm");
  report_cmd->add_option("--machine", report_args.machine, "Only records on this machine type");
  report_cmd->add_option("--groups", report_args.groups, "Cluster the catalog into this many resource groups");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    g.weights.validate();
    if (app.got_subcommand(import_cmd)) cmd_import(g, import_args, out);
    if (app.got_subcommand(merge_cmd)) cmd_merge(g, merge_args, out);
    if (app.got_subcommand(reduce_cmd)) cmd_reduce(g, reduce_args, out);
    if (app.got_subcommand(train_cmd)) cmd_train(g, train_args, out);
    if (app.got_subcommand(evaluate_cmd)) cmd_evaluate(g, evaluate_args, out);
    if (app.got_subcommand(predict_cmd)) cmd_predict(g, predict_args, out);
    if (app.got_subcommand(recommend_cmd)) cmd_recommend(g, recommend_args, out);
    if (app.got_subcommand(simulate_cmd)) cmd_simulate(g, simulate_args, out);
    if (app.got_subcommand(gen_cmd)) cmd_gen(g, gen_args, out);
    if (app.got_subcommand(report_cmd)) cmd_report(g, report_args, out);
  } catch (const std::exception& e) {
    err << "colcfg: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace colcfg::cli
