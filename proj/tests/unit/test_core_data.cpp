#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "colcfg/errors.hpp"
#include "colcfg/hash.hpp"
#include "colcfg/jsonl.hpp"
#include "colcfg/repository.hpp"
#include "colcfg/synth.hpp"
#include "test_support.hpp"

using namespace colcfg;
using colcfg::testing::sample_record;

namespace {

Catalog small_catalog() {
  return Catalog({{"m5.xlarge", MachineCategory::m, 4, 16.0, 0.192}, {"c5.large", MachineCategory::c, 2, 4.0, 0.085}});
}

std::set<std::string> fingerprints(const Repository& repo) {
  std::set<std::string> out;
  for (const auto& [fp, r] : repo.records()) out.insert(fp);
  return out;
}

}  // namespace

TEST_SUITE("core-data") {
  TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(to_hex(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("timestamp does not enter the fingerprint") {
    auto a = sample_record();
    auto b = sample_record();
    b.timestamp = "2031-12-31T23:59:59Z";
    CHECK(record_fingerprint(a) == record_fingerprint(b));
  }

  TEST_CASE("scale_out 8 and 9 fingerprint differently") {
    CHECK(record_fingerprint(sample_record(8)) != record_fingerprint(sample_record(9)));
  }

  TEST_CASE("golden record digest is pinned") {
    CHECK(record_fingerprint(sample_record()) == "34a96f4916889177");
  }

  TEST_CASE("fingerprint is stable under JSON field reordering") {
    const std::string ordered =
        R"({"context":{"dataset":{"size_bytes":1000},"job":{"algorithm":"grep","params":{"a":1,"b":"x"}},)"
        R"("machine":"c5.large","origin":"o","sys_config":{}},"runtime_s":5.5,"scale_out":4})";
    const std::string shuffled =
        R"({"scale_out":4,"runtime_s":5.5,"context":{"sys_config":{},"origin":"o","machine":"c5.large",)"
        R"("job":{"params":{"b":"x","a":1},"algorithm":"grep"},"dataset":{"size_bytes":1000}}})";
    CHECK(record_from_json_line(ordered).fingerprint == record_from_json_line(shuffled).fingerprint);
  }

  TEST_CASE("negative zero and integral reals canonicalize identically") {
    auto a = sample_record();
    auto b = sample_record();
    a.context.sys_config["x"] = 0.0;
    b.context.sys_config["x"] = -0.0;
    CHECK(record_fingerprint(a) == record_fingerprint(b));
  }

  TEST_CASE("record validation") {
    auto r = sample_record();
    r.runtime_s = 0.0;
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = sample_record();
    r.scale_out = 0;
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = sample_record();
    r.context.job.algorithm.clear();
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = sample_record();
    r.context.dataset.extra["bad"] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate(r), ValidationError);
  }

  TEST_CASE("machine type validation and catalog conflicts") {
    CHECK_THROWS_AS(validate(MachineType{"x", MachineCategory::m, 0, 1.0, 0.1}), ValidationError);
    CHECK_THROWS_AS(validate(MachineType{"x", MachineCategory::m, 1, 0.0, 0.1}), ValidationError);
    CHECK_THROWS_AS(validate(MachineType{"x", MachineCategory::m, 1, 1.0, -0.1}), ValidationError);

    Catalog c = small_catalog();
    c.add({"m5.xlarge", MachineCategory::m, 4, 16.0, 0.192});  // identical: no-op
    CHECK(c.size() == 2);
    CHECK_THROWS_AS(c.add({"m5.xlarge", MachineCategory::m, 8, 16.0, 0.192}), MergeConflictError);

    Catalog other({{"m5.xlarge", MachineCategory::m, 4, 32.0, 0.192}, {"c5.large", MachineCategory::c, 2, 4.0, 0.1}});
    try {
      merge_catalogs(c, other);
      FAIL("expected a merge conflict");
    } catch (const MergeConflictError& e) {
      CHECK(e.names() == std::vector<std::string>{"c5.large", "m5.xlarge"});
    }
  }

  TEST_CASE("append_record") {
    Repository repo(small_catalog());
    auto first = append_record(repo, sample_record());
    CHECK(first.inserted);
    CHECK(first.repo.size() == 1);
    auto second = append_record(first.repo, sample_record());
    CHECK_FALSE(second.inserted);
    CHECK(second.repo.size() == 1);

    auto unknown = sample_record();
    unknown.context.machine = "x9.huge";
    try {
      append_record(repo, unknown);
      FAIL("expected validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("x9.huge") != std::string::npos);
    }
    auto supplied = append_record(repo, unknown, MachineType{"x9.huge", MachineCategory::other, 96, 768.0, 9.0});
    CHECK(supplied.inserted);
    CHECK(supplied.repo.catalog().find("x9.huge") != nullptr);
  }

  TEST_CASE("dedup keeps the earliest timestamp") {
    auto late = sample_record();
    late.timestamp = "2025-06-01T00:00:00Z";
    auto early = sample_record();
    early.timestamp = "2024-01-01T00:00:00Z";
    auto repo = append_record(append_record(Repository(small_catalog()), late).repo, early).repo;
    CHECK(repo.record_list().front().timestamp == "2024-01-01T00:00:00Z");
  }

  TEST_CASE("append 930 generated records") {
    const auto catalog = standard_catalog();
    Repository repo(catalog);
    for (auto& r : generate_repository(930, 42, catalog)) repo = append_record(std::move(repo), r).repo;
    CHECK(repo.size() == 930);
  }

  TEST_CASE("append then query by fingerprint returns the record") {
    const auto catalog = standard_catalog();
    Repository repo(catalog);
    for (auto& r : generate_repository(50, 3, catalog)) {
      repo = append_record(std::move(repo), r).repo;
      const auto hits = query(repo, RecordFilter{.fingerprint = record_fingerprint(r)});
      REQUIRE(hits.size() == 1);
      CHECK(hits.front().runtime_s == r.runtime_s);
    }
  }

  TEST_CASE("merge with planted overlap") {
    const auto catalog = standard_catalog();
    const auto pool = generate_repository(60, 11, catalog);
    std::vector<ExecutionRecord> a(pool.begin(), pool.begin() + 35);
    std::vector<ExecutionRecord> b(pool.begin() + 25, pool.end());
    const auto ra = make_repository(catalog, a);
    const auto rb = make_repository(catalog, b);
    const auto m = merge_repositories(ra, rb);
    // |A| + |B| - |A n B| against a brute-force set union.
    std::set<std::string> brute;
    for (const auto& r : a) brute.insert(r.fingerprint);
    for (const auto& r : b) brute.insert(r.fingerprint);
    CHECK(m.size() == ra.size() + rb.size() - 10);
    CHECK(fingerprints(m) == brute);
    CHECK(same_record_set(merge_repositories(ra, Repository(catalog)), ra));
  }

  TEST_CASE("merge rejects conflicting catalogs") {
    Repository a(small_catalog());
    Repository b(Catalog({{"m5.xlarge", MachineCategory::m, 4, 15.0, 0.192}}));
    CHECK_THROWS_AS(merge_repositories(a, b), MergeConflictError);
  }

  TEST_CASE("merge algebra holds on 1000 random cases") {
    const auto catalog = standard_catalog();
    auto pool = generate_repository(40, 5, catalog);
    // Same-fingerprint copies with other timestamps exercise the dedup rule.
    for (int i = 0; i < 10; ++i) {
      auto dup = pool[static_cast<std::size_t>(i)];
      dup.timestamp = "2020-01-0" + std::to_string(i % 9 + 1) + "T00:00:00Z";
      pool.push_back(dup);
    }
    std::mt19937_64 rng(2024);
    auto random_repo = [&] {
      std::vector<ExecutionRecord> picked;
      const auto n = rng() % 15;
      for (std::size_t i = 0; i < n; ++i) picked.push_back(pool[rng() % pool.size()]);
      return make_repository(catalog, picked);
    };
    auto same = [](const Repository& x, const Repository& y) { return x.record_list() == y.record_list(); };
    for (int trial = 0; trial < 1000; ++trial) {
      const auto a = random_repo();
      const auto b = random_repo();
      const auto c = random_repo();
      REQUIRE(same(merge_repositories(a, a), a));
      REQUIRE(same(merge_repositories(a, b), merge_repositories(b, a)));
      REQUIRE(same(merge_repositories(merge_repositories(a, b), c), merge_repositories(a, merge_repositories(b, c))));
    }
  }

  TEST_CASE("query filters") {
    const auto catalog = standard_catalog();
    const auto records = generate_repository(200, 9, catalog);
    const auto repo = make_repository(catalog, records);
    CHECK(query(repo, [](const ExecutionRecord&) { return true; }).size() == repo.size());

    const auto local = query(repo, RecordFilter{.origin = std::string("local-lab")});
    const auto planted = std::count_if(records.begin(), records.end(),
                                       [](const auto& r) { return r.context.origin == "local-lab"; });
    CHECK(local.size() == static_cast<std::size_t>(planted));
    CHECK(std::is_sorted(local.begin(), local.end(),
                         [](const auto& x, const auto& y) { return x.fingerprint < y.fingerprint; }));

    CHECK(query(Repository(catalog), RecordFilter{.algorithm = std::string("kmeans")}).empty());
  }

  TEST_CASE("jsonl round trip keeps unknown fields") {
    const std::string line =
        R"({"context":{"dataset":{"size_bytes":5},"job":{"algorithm":"grep","params":{}},"machine":"c5.large",)"
        R"("origin":"o","sys_config":{}},"runtime_s":2.0,"scale_out":2,"timestamp":"2025-01-01T00:00:00Z",)"
        R"("x_vendor":{"nested":[1,2,3]}})";
    const auto record = record_from_json_line(line);
    REQUIRE(record.unknown_fields.count("x_vendor") == 1);
    const auto again = record_from_json_line(to_json_line(record));
    CHECK(again == record);
    CHECK(to_json_line(again).find(R"("x_vendor":{"nested":[1,2,3]})") != std::string::npos);
  }

  TEST_CASE("jsonl round trip of records with stage runs and catalogs") {
    auto r = sample_record();
    r.stage_runs = std::vector<StageRun>{{"map", 0, 8, 12.5, {{"cpu_util", 0.7}}, false}};
    r = finalize(r);
    std::stringstream s;
    write_records(s, {r});
    const auto back = read_records(s);
    REQUIRE(back.size() == 1);
    CHECK(back.front() == r);

    std::stringstream c;
    write_catalog(c, standard_catalog());
    const auto catalog = read_catalog(c);
    CHECK(catalog.size() == 9);
    CHECK(catalog.types() == standard_catalog().types());
  }

  TEST_CASE("malformed lines are validation errors") {
    CHECK_THROWS_AS(record_from_json_line("{not json"), ValidationError);
    CHECK_THROWS_AS(record_from_json_line(R"({"scale_out":2})"), ValidationError);
    CHECK_THROWS_AS(machine_from_json_line(R"({"name":"x","category":"q","vcpus":1,"memory_gb":1,"price_per_hour":0})"),
                    ValidationError);
  }
}
