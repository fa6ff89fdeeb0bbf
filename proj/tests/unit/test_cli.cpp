#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "colcfg/jsonl.hpp"
#include "test_support.hpp"
#include "cli.hpp"

using colcfg::testing::slurp;
using colcfg::testing::TempDir;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = colcfg::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("gen writes a 930-line repository") {
    TempDir dir("cli-gen");
    const auto repo = dir.file("repo.jsonl");
    const auto r = run({"gen", "--kind", "repo", "--jobs", "930", "--out", repo});
    REQUIRE(r.code == 0);
    CHECK(line_count(slurp(repo)) == 930);
    CHECK(colcfg::load_records(repo).size() == 930);
  }

  TEST_CASE("merge is order independent at the byte level") {
    TempDir dir("cli-merge");
    const auto a = dir.file("a.jsonl");
    const auto b = dir.file("b.jsonl");
    REQUIRE(run({"gen", "--kind", "repo", "--jobs", "40", "--seed", "1", "--out", a}).code == 0);
    REQUIRE(run({"gen", "--kind", "repo", "--jobs", "40", "--seed", "2", "--out", b}).code == 0);
    const auto ab = dir.file("ab.jsonl");
    const auto ba = dir.file("ba.jsonl");
    REQUIRE(run({"merge", a, b, "--out", ab}).code == 0);
    REQUIRE(run({"merge", b, a, "--out", ba}).code == 0);
    CHECK(slurp(ab) == slurp(ba));
    CHECK_FALSE(slurp(ab).empty());
  }

  TEST_CASE("recommend emits one row per candidate") {
    TempDir dir("cli-rec");
    const auto catalog = dir.file("catalog.jsonl");
    const auto train = dir.file("train.jsonl");
    const auto query = dir.file("query.json");
    const auto model = dir.file("model.json");
    REQUIRE(run({"gen", "--kind", "catalog", "--out", catalog}).code == 0);
    REQUIRE(run({"gen", "--kind", "two-population", "--global", "0", "--local", "30", "--holdout", "5", "--query-out",
                 query, "--holdout-out", dir.file("holdout.jsonl"), "--out", train})
                .code == 0);
    REQUIRE(run({"train", "--repo", train, "--catalog", catalog, "--model", "parametric", "--out", model}).code == 0);

    const auto rec = run({"recommend", "--model-file", model, "--catalog", catalog, "--query", query, "--target-s",
                          "300", "--scale-outs", "4:36:4"});
    REQUIRE(rec.code == 0);
    CHECK(line_count(rec.out) == 1 + 9 * 9);
    const auto narrow = run({"recommend", "--model-file", model, "--catalog", catalog, "--query", query, "--target-s",
                             "300", "--scale-outs", "2:10:2"});
    CHECK(line_count(narrow.out) == 1 + 9 * 5);
  }

  TEST_CASE("exit codes") {
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"gen", "--no-such-flag"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    const auto missing = run({"merge", "/definitely/not/here.jsonl"});
    CHECK(missing.code == 2);

    TempDir dir("cli-exit");
    const auto bad = dir.file("bad.jsonl");
    std::ofstream(bad) << "{not json\n";
    const auto invalid = run({"merge", bad});
    CHECK(invalid.code == 1);
    CHECK(invalid.out.empty());
    CHECK(invalid.err.find("colcfg:") != std::string::npos);

    CHECK(run({"gen", "--kind", "repo", "--jobs", "5", "--w-job", "0.9"}).code == 1);
  }

  TEST_CASE("config file values apply and flags override them") {
    TempDir dir("cli-config");
    const auto config = dir.file("colcfg.ini");
    std::ofstream(config) << "seed=7\n";
    const auto from_config = run({"--config", config, "gen", "--kind", "repo", "--jobs", "5"});
    const auto seven = run({"--seed", "7", "gen", "--kind", "repo", "--jobs", "5"});
    const auto nine = run({"--config", config, "--seed", "9", "gen", "--kind", "repo", "--jobs", "5"});
    const auto plain_nine = run({"--seed", "9", "gen", "--kind", "repo", "--jobs", "5"});
    REQUIRE(from_config.code == 0);
    CHECK(from_config.out == seven.out);
    CHECK(nine.out == plain_nine.out);
    CHECK(nine.out != seven.out);
  }

  TEST_CASE("the same seed reproduces simulate output byte for byte") {
    TempDir dir("cli-sim");
    const auto spec = dir.file("spec.json");
    REQUIRE(run({"gen", "--kind", "sim-spec", "--seed", "3", "--out", spec}).code == 0);
    const auto a = run({"simulate", "--spec", spec, "--runs", "4", "--threads", "2"});
    const auto b = run({"simulate", "--spec", spec, "--runs", "4", "--threads", "1"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("run_id,iteration,stage_id,scale_out,runtime_s,anomalous,elapsed_s\n", 0) == 0);
  }
}
