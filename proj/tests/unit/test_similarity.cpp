#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "colcfg/errors.hpp"
#include "colcfg/similarity.hpp"
#include "colcfg/synth.hpp"

using namespace colcfg;

namespace {

Catalog three_machines() {
  return Catalog({{"a", MachineCategory::c, 2, 4.0, 0.1},
                  {"b", MachineCategory::m, 4, 16.0, 0.2},
                  {"c", MachineCategory::r, 8, 64.0, 0.5}});
}

ExecutionContext context_on(const std::string& machine) {
  ExecutionContext c;
  c.job.algorithm = "kmeans";
  c.job.params["k"] = 10.0;
  c.job.params["init"] = std::string("random");
  c.dataset.size_bytes = 20'000'000'000ULL;
  c.machine = machine;
  c.origin = "local-lab";
  return c;
}

}  // namespace

TEST_SUITE("similarity") {
  TEST_CASE("weights validation") {
    CHECK_NOTHROW(SimilarityWeights{}.validate());
    CHECK_THROWS_AS((SimilarityWeights{0.5, 0.5, 0.5, 2.0}.validate()), ValidationError);
    CHECK_THROWS_AS((SimilarityWeights{0.5, 0.25, 0.25, 0.5}.validate()), ValidationError);
    CHECK_THROWS_AS((SimilarityWeights{1.2, -0.1, -0.1, 2.0}.validate()), ValidationError);
  }

  TEST_CASE("machine similarity by hand") {
    const auto catalog = three_machines();
    const auto bounds = FeatureBounds::from_catalog(catalog);
    // b normalizes to (2/6, 12/60, 0.1/0.4); a sits at the origin.
    const double expected = 1.0 - std::sqrt((1.0 / 9.0 + 0.04 + 0.0625) / 3.0);
    CHECK(machine_similarity(catalog.at("a"), catalog.at("b"), bounds) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(machine_similarity(catalog.at("a"), catalog.at("c"), bounds) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(machine_similarity(catalog.at("b"), catalog.at("b"), bounds) == 1.0);
  }

  TEST_CASE("constant features normalize to zero") {
    Catalog flat({{"x", MachineCategory::m, 4, 16.0, 0.2}, {"y", MachineCategory::m, 4, 16.0, 0.2}});
    const auto bounds = FeatureBounds::from_catalog(flat);
    const auto f = bounds.normalize(flat.at("x"));
    CHECK(f == MachineFeatures{0.0, 0.0, 0.0});
  }

  TEST_CASE("job match levels") {
    JobSignature a{"kmeans", {{"k", 10.0}}, std::nullopt};
    JobSignature b{"kmeans", {{"k", 10.0}}, std::nullopt};
    CHECK(job_match_level(a, b).level == JobMatch::exact);

    JobSignature c{"other", {}, std::string("plan-1")};
    JobSignature d{"renamed", {{"z", 1.0}}, std::string("plan-1")};
    CHECK(job_match_level(c, d).level == JobMatch::exact);

    JobSignature e{"kmeans", {{"k", 10.5}, {"init", std::string("random")}}, std::nullopt};
    JobSignature f{"kmeans", {{"k", 10.0}, {"init", std::string("k-means++")}, {"max_iter", 20.0}}, std::nullopt};
    const auto m = job_match_level(e, f);
    CHECK(m.level == JobMatch::same_algorithm);
    CHECK(m.param_similarity == doctest::Approx(1.0 / 3.0));

    JobSignature g{"grep", {}, std::nullopt};
    CHECK(job_match_level(a, g).level == JobMatch::none);
  }

  TEST_CASE("dataset similarity") {
    DatasetDescriptor a{20'000'000'000ULL, std::nullopt, std::nullopt, {}};
    DatasetDescriptor b{2'000'000'000ULL, std::nullopt, std::nullopt, {}};
    const double lg = std::log10(2e10 + 1.0) - std::log10(2e9 + 1.0);
    CHECK(dataset_similarity(a, b) == doctest::Approx(1.0 - lg / 6.0).epsilon(1e-12));
    DatasetDescriptor tiny{10, std::nullopt, std::nullopt, {}};
    CHECK(dataset_similarity(a, tiny) == 0.0);
    CHECK(dataset_similarity(a, a) == 1.0);
  }

  TEST_CASE("context similarity under default weights, by hand") {
    const auto catalog = three_machines();
    auto q = context_on("a");
    auto r = context_on("b");
    r.job.params["k"] = 10.5;
    r.job.params["init"] = std::string("k-means++");
    r.job.params["max_iter"] = 20.0;
    r.dataset.size_bytes = 2'000'000'000ULL;

    const double job = 0.5 * (1.0 / 3.0);
    const double dataset = 1.0 - (std::log10(2e10 + 1.0) - std::log10(2e9 + 1.0)) / 6.0;
    const double machine = 1.0 - std::sqrt((1.0 / 9.0 + 0.04 + 0.0625) / 3.0);
    const double expected = 0.5 * job + 0.25 * dataset + 0.25 * machine;
    CHECK(context_similarity(q, r, SimilarityWeights{}, catalog) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(context_similarity(q, q, SimilarityWeights{}, catalog) == doctest::Approx(1.0));
    CHECK(context_similarity(q, r, SimilarityWeights{}, catalog) ==
          doctest::Approx(context_similarity(r, q, SimilarityWeights{}, catalog)));
  }

  TEST_CASE("unknown machine is an error") {
    CHECK_THROWS_AS(context_similarity(context_on("a"), context_on("zz"), SimilarityWeights{}, three_machines()),
                    ValidationError);
  }

  TEST_CASE("resource grouping reaches the brute-force optimum on the standard catalog") {
    const auto catalog = standard_catalog();
    const auto bounds = FeatureBounds::from_catalog(catalog);
    std::vector<MachineFeatures> points;
    for (const auto& m : catalog) points.push_back(bounds.normalize(m));

    // Every assignment of 9 points to 3 labels with no empty label.
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> label(points.size(), 0);
    for (int code = 0; code < 19683; ++code) {
      int x = code;
      for (auto& l : label) {
        l = x % 3;
        x /= 3;
      }
      double sse = 0.0;
      bool empty = false;
      for (int g = 0; g < 3 && !empty; ++g) {
        MachineFeatures mean{0, 0, 0};
        int count = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (label[i] != g) continue;
          for (int d = 0; d < 3; ++d) mean[d] += points[i][d];
          ++count;
        }
        if (count == 0) {
          empty = true;
          break;
        }
        for (auto& v : mean) v /= count;
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (label[i] != g) continue;
          for (int d = 0; d < 3; ++d) sse += (points[i][d] - mean[d]) * (points[i][d] - mean[d]);
        }
      }
      if (!empty) best = std::min(best, sse);
    }

    const auto groups = group_resources(catalog, 3, 42);
    CHECK(groups.size() == 3);
    CHECK(within_cluster_sse(groups, catalog) == doctest::Approx(best).epsilon(1e-9));

    std::set<std::string> seen;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      CHECK(groups[g].group_id == static_cast<int>(g));
      for (const auto& name : groups[g].members) CHECK(seen.insert(name).second);
    }
    CHECK(seen.size() == catalog.size());
    // Numbered by first member's catalog position.
    for (std::size_t g = 1; g < groups.size(); ++g) {
      CHECK(*catalog.index_of(groups[g - 1].members.front()) < *catalog.index_of(groups[g].members.front()));
    }
  }

  TEST_CASE("resource grouping is deterministic and validates k") {
    const auto catalog = standard_catalog();
    const auto a = group_resources(catalog, 4, 7);
    const auto b = group_resources(catalog, 4, 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].members == b[i].members);
    CHECK_THROWS_AS(group_resources(catalog, 0, 1), ValidationError);
    CHECK(group_resources(catalog, 9, 1).size() == 9);
  }
}
