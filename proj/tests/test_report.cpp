#include "doctest.h"
#include "sciret/errors.hpp"
#include "sciret/report.hpp"
#include "test_util.hpp"

using namespace sciret;

namespace {

QueryResult result(const std::string& id, const std::vector<std::string>& docs) {
  QueryResult r;
  r.query_id = id;
  double s = 1.0;
  for (const auto& d : docs) r.ranking.push_back({d, s -= 0.1});
  return r;
}

}  // namespace

TEST_CASE("submission format") {
  testutil::TempDir dir;
  write_submission({result("q1", {"a", "b"})}, dir / "s.tsv");
  CHECK(testutil::read_file(dir / "s.tsv") == "post_id\tpreds\nq1\t['a', 'b']\n");

  write_submission({result("1", {"a", "b", "c", "d", "e", "f", "g"}), result("2", {"z"})},
                   dir / "t.tsv");
  CHECK(testutil::read_file(dir / "t.tsv") ==
        "post_id\tpreds\n1\t['a', 'b', 'c', 'd', 'e']\n2\t['z']\n");
}

TEST_CASE("one data line per query") {
  testutil::TempDir dir;
  std::vector<QueryResult> many;
  for (int i = 0; i < 1446; ++i) many.push_back(result(std::to_string(i), {"d"}));
  write_submission(many, dir / "s.tsv");
  const auto text = testutil::read_file(dir / "s.tsv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1447);
}

TEST_CASE("invalid submissions leave no file") {
  testutil::TempDir dir;
  CHECK_THROWS_AS(write_submission({}, dir / "e.tsv"), DataError);
  CHECK_FALSE(std::filesystem::exists(dir / "e.tsv"));
  CHECK_THROWS_AS(write_submission({result("q", {})}, dir / "n.tsv"), DataError);
  CHECK_FALSE(std::filesystem::exists(dir / "n.tsv"));
  CHECK_THROWS_AS(write_submission({result("q", {"a"})}, dir / "no" / "such" / "dir.tsv"),
                  DataError);
}

TEST_CASE("report table and json") {
  EvalReport r = evaluate_rankings({"q1", "q2"}, {{"a", "g"}, {"g"}}, {"g", "g"});
  r.label = "rerank";
  r.config_fingerprint = "abc123";
  r.depth = 5;
  const std::string table = format_report_table({r});
  CHECK(table.find("75.00") != std::string::npos);   // MRR@5 = (1/2 + 1)/2
  CHECK(table.find("abc123") != std::string::npos);
  CHECK(table.find(" -") != std::string::npos);      // @30 beyond depth 5
  const auto j = report_to_json(r);
  CHECK(j["config_fingerprint"] == "abc123");
  CHECK(j["mrr"]["5"].get<double>() == doctest::Approx(0.75));
  CHECK(j["per_query"][0]["gold_rank"] == 2);
  CHECK(format_report_detail(r).find("Success/Precision") != std::string::npos);
}

TEST_CASE("search results listing") {
  const auto text = format_search_results({result("q1", {"a", "b"})});
  CHECK(text.rfind("query_id\trank\tdoc_id\tscore\n", 0) == 0);
  CHECK(text.find("q1\t2\tb\t") != std::string::npos);
}
