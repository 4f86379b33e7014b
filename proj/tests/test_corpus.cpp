#include "doctest.h"
#include "sciret/corpus.hpp"
#include "sciret/errors.hpp"
#include "test_util.hpp"

using namespace sciret;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("doc_text joins title and abstract with one newline") {
  CHECK(doc_text({"x", "A", "B"}) == "A\nB");
  CHECK(doc_text({"x", "A", ""}) == "A\n");
  CHECK(doc_text({"x", "T1", "p1\n\n  p2  "}) == "T1\np1\n\n  p2  ");
}

TEST_CASE("jsonl corpus keeps order and indexes ids") {
  TempDir dir;
  write_file(dir / "c.jsonl",
             "{\"cord_uid\":\"a\",\"title\":\"t1\",\"abstract\":\"x\"}\n"
             "{\"cord_uid\":\"b\",\"title\":\"t2\",\"abstract\":\"y\",\"journal\":\"ignored\"}\n"
             "\n"
             "{\"cord_uid\":\"c\",\"title\":\"t3\"}\n");
  const Corpus c = load_corpus(dir / "c.jsonl");
  REQUIRE(c.size() == 3);
  CHECK(c.position("a") == 0U);
  CHECK(c.position("b") == 1U);
  CHECK(c.position("c") == 2U);
  CHECK_FALSE(c.position("d"));
  CHECK(c.by_id("c").abstract.empty());
}

TEST_CASE("tsv corpus with header") {
  const Corpus c = load_corpus(testutil::fixture("tiny_corpus.tsv"));
  REQUIRE(c.size() == 2);
  CHECK(c.at(0).doc_id == "t1");
  CHECK(c.at(0).abstract == "First abstract");
  CHECK(c.at(1).abstract.empty());
}

TEST_CASE("corpus load errors") {
  TempDir dir;
  SUBCASE("empty file") {
    write_file(dir / "e.jsonl", "");
    CHECK_THROWS_WITH_AS(load_corpus(dir / "e.jsonl"), doctest::Contains("empty corpus"),
                         DataError);
  }
  SUBCASE("duplicate id") {
    write_file(dir / "d.jsonl",
               "{\"cord_uid\":\"a\",\"title\":\"t\"}\n{\"cord_uid\":\"a\",\"title\":\"u\"}\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir / "d.jsonl"), doctest::Contains("duplicate"), DataError);
  }
  SUBCASE("malformed line reports its number") {
    write_file(dir / "m.jsonl", "{\"cord_uid\":\"a\",\"title\":\"t\"}\n{not json\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir / "m.jsonl"), doctest::Contains("2"), DataError);
  }
  SUBCASE("title and abstract both empty") {
    write_file(dir / "b.jsonl", "{\"cord_uid\":\"a\",\"title\":\"\",\"abstract\":\"\"}\n");
    CHECK_THROWS_AS(load_corpus(dir / "b.jsonl"), DataError);
  }
  SUBCASE("invalid utf-8") {
    write_file(dir / "u.jsonl", "{\"cord_uid\":\"a\",\"title\":\"bad \xff byte\"}\n");
    CHECK_THROWS_AS(load_corpus(dir / "u.jsonl"), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_corpus(dir / "nope.jsonl"), DataError);
  }
}

TEST_CASE("corpus round-trips through jsonl") {
  TempDir dir;
  const Corpus c = load_corpus(testutil::fixture("mini_corpus.jsonl"));
  write_corpus_jsonl(c, dir / "out.jsonl");
  const Corpus again = load_corpus(dir / "out.jsonl");
  CHECK(again == c);
  CHECK(again.fingerprint() == c.fingerprint());
}

TEST_CASE("queries") {
  SUBCASE("tsv without gold keeps order") {
    const QuerySet q = load_queries(testutil::fixture("blind_queries.tsv"));
    REQUIRE(q.queries.size() == 2);
    CHECK_FALSE(q.has_gold);
    CHECK(q.queries[0].query_id == "1001");
    CHECK(q.queries[1].query_id == "1002");
    CHECK_FALSE(q.queries[0].gold_doc_id);
  }
  SUBCASE("jsonl with gold") {
    const QuerySet q = load_queries(testutil::fixture("mini_queries.jsonl"));
    CHECK(q.has_gold);
    CHECK(q.queries.size() == 5);
    CHECK(q.queries[2].gold_doc_id == "m4");
  }
  TempDir dir;
  SUBCASE("duplicate query id") {
    write_file(dir / "q.tsv", "post_id\ttweet_text\n1\ta\n1\tb\n");
    CHECK_THROWS_AS(load_queries(dir / "q.tsv"), DataError);
  }
  SUBCASE("mixed gold presence") {
    write_file(dir / "q.jsonl",
               "{\"post_id\":\"1\",\"tweet_text\":\"a\",\"cord_uid\":\"x\"}\n"
               "{\"post_id\":\"2\",\"tweet_text\":\"b\"}\n");
    CHECK_THROWS_AS(load_queries(dir / "q.jsonl"), DataError);
  }
  SUBCASE("multiple gold ids are rejected") {
    write_file(dir / "q.tsv", "post_id\ttweet_text\tcord_uid\n1\ta\tx,y\n");
    CHECK_THROWS_AS(load_queries(dir / "q.tsv"), DataError);
  }
  SUBCASE("format override") {
    write_file(dir / "q.txt", "post_id\ttweet_text\n7\thello\n");
    CHECK(load_queries(dir / "q.txt", FileFormat::tsv).queries.at(0).text == "hello");
  }
}
