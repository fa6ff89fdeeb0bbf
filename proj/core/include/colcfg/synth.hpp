#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "colcfg/features.hpp"
#include "colcfg/simulator.hpp"
#include "colcfg/types.hpp"

namespace colcfg {

// c5/m5/r5 x large/xlarge/2xlarge.
Catalog standard_catalog();

// Planted runtime for a context: base + slope * data_gb / s + 4 * log2(s),
// where the slope depends on algorithm, parameters, machine and origin.
// Kmeans with k = 10 on m5.xlarge from "local-lab" has slope 100.
double planted_slope(const ExecutionContext& context, const Catalog& catalog);
double two_population_slope(const ExecutionContext& context, const ExecutionContext& reference, const Catalog& catalog);
double planted_runtime(const ExecutionContext& context, int scale_out, const Catalog& catalog);

// `count` distinct finalized records over several algorithms, origins,
// machines and dataset sizes, with lognormal runtime noise.
std::vector<ExecutionRecord> generate_repository(std::size_t count, std::uint64_t seed, const Catalog& catalog,
                                                 double noise_sigma = 0.05);

struct PopulationOptions {
  std::size_t global_records = 400;
  std::size_t local_records = 40;
  std::size_t holdout_records = 40;
  std::string local_origin = "local-lab";
  double noise_sigma = 0.05;
  bool far_global = false;  // see generate_two_population
};

struct TwoPopulation {
  Catalog catalog;
  ExecutionContext query;  // kmeans k = 10 on m5.xlarge, 20 GB, local origin
  std::vector<ExecutionRecord> global;
  std::vector<ExecutionRecord> local;
  std::vector<ExecutionRecord> holdout;  // same context family as local
};

// Runtime 20 + slope * d / s + 4 * log2(s) with
// slope = 100 + 400 * (1 - similarity to the query context), data size
// ignored in the similarity. Local records share the query context (slope
// 100); global records are kmeans runs from other origins with other k,
// machines and data sizes. With far_global the query sits on c5.large and
// every global row is an sgd run on r5.2xlarge with kilobyte-scale data, so
// its similarity to the query is zero (slope 500).
TwoPopulation generate_two_population(const PopulationOptions& options, std::uint64_t seed);

// Noise-free (unless noise_sigma > 0) runtimes theta . (1, d/s, log2 s, s).
std::vector<ExecutionRecord> planted_scale_out_records(const ScaleOutFeatures& theta, const std::vector<int>& scale_outs,
                                                    double data_gb, double noise_sigma = 0.0,
                                                    std::uint64_t seed = 42);

struct SimSpecOptions {
  int iterations = 20;
  double noise_sigma = 0.05;
  double anomaly_rate = 0.05;
  double target_slack = 1.1;  // target = slack * anomaly-free total at the initial scale-out
  int initial_scale_out = 8;
  ScaleOutRange bounds;
};

// Load stage (iteration 0 only) feeding a map -> shuffle -> reduce chain plus
// a side stage parallel to shuffle. Stage truths are non-negative linear
// functions of the stage descriptors.
SimulationSpec generate_sim_spec(const SimSpecOptions& options, std::uint64_t seed);

}  // namespace colcfg
