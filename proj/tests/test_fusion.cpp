#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sciret/errors.hpp"
#include "sciret/fusion.hpp"
#include "sciret/rerank.hpp"
#include "test_util.hpp"

using namespace sciret;

namespace {

std::vector<Candidate> branch(const std::vector<std::string>& ids, Source s) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Candidate c;
    c.doc_id = ids[i];
    c.sources = static_cast<unsigned>(s);
    const double score = 1.0 / double(i + 1);
    if (s == Source::lexical) {
      c.lexical_rank = i + 1;
      c.lexical_score = score;
    } else {
      c.semantic_rank = i + 1;
      c.semantic_score = score;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("merge keeps both provenances") {
  const auto lex = branch({"a", "b", "c"}, Source::lexical);
  const auto sem = branch({"c", "d"}, Source::semantic);
  const auto merged = merge_candidates(lex, sem);
  CHECK(ids_of(merged) == std::vector<std::string>{"c", "d", "a", "b"});
  const auto& c = merged[0];
  CHECK(c.has(Source::lexical));
  CHECK(c.has(Source::semantic));
  CHECK(c.lexical_rank == 3U);
  CHECK(c.semantic_rank == 1U);
  CHECK_FALSE(merged[1].has(Source::lexical));
  CHECK_FALSE(merged[2].semantic_rank);

  CHECK(merge_candidates({}, {}).empty());
  CHECK(ids_of(merge_candidates(lex, {})) == std::vector<std::string>{"a", "b", "c"});
  CHECK_THROWS_AS(merge_candidates(branch({"a", "a"}, Source::lexical), {}), DataError);
}

TEST_CASE("merge is a set union") {
  std::mt19937 rng(8);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> pool;
    for (int i = 0; i < 20; ++i) pool.push_back("p" + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> a(pool.begin(), pool.begin() + rng() % 12);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> b(pool.begin(), pool.begin() + rng() % 12);
    const auto merged = ids_of(merge_candidates(branch(a, Source::lexical), branch(b, Source::semantic)));
    std::set<std::string> expected(a.begin(), a.end());
    expected.insert(b.begin(), b.end());
    CHECK(std::set<std::string>(merged.begin(), merged.end()) == expected);
    CHECK(merged.size() == expected.size());
  }
}

TEST_CASE("RRF hand example") {
  const auto fused = rrf_fuse({{"d1", "d2", "d3"}, {"d2", "d4", "d1"}}, {20.0, 100});
  CHECK(ids_of(fused) == std::vector<std::string>{"d2", "d1", "d4", "d3"});
  CHECK(fused[0].score == doctest::Approx(1.0 / 22 + 1.0 / 21).epsilon(1e-15));
  CHECK(fused[1].score == doctest::Approx(1.0 / 21 + 1.0 / 23).epsilon(1e-15));
}

TEST_CASE("RRF edge cases") {
  CHECK(rrf_fuse({}, {}).empty());
  CHECK(rrf_fuse({{}, {}}, {}).empty());
  // Single list: order preserved.
  CHECK(ids_of(rrf_fuse({{"z", "y", "x"}}, {})) == std::vector<std::string>{"z", "y", "x"});
  // Window cuts each list independently.
  const auto w = rrf_fuse({{"a", "b", "c"}, {"c", "d"}}, {20.0, 1});
  CHECK(ids_of(w) == std::vector<std::string>{"a", "c"});
  // Equal contributions tie on id.
  CHECK(ids_of(rrf_fuse({{"b"}, {"a"}}, {})) == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(rrf_fuse({{"a", "a"}}, {}), DataError);
  CHECK_THROWS_AS(rrf_fuse({{"a"}}, {0.0, 10}), UsageError);
  CHECK_THROWS_AS(rrf_fuse({{"a"}}, {20.0, 0}), UsageError);
}

TEST_CASE("RRF agrees with direct summation and ignores list order") {
  std::mt19937 rng(12);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::vector<std::string>> lists(1 + rng() % 4);
    for (auto& l : lists) {
      std::vector<std::string> pool;
      for (int i = 0; i < 30; ++i) pool.push_back("doc" + std::to_string(i));
      std::shuffle(pool.begin(), pool.end(), rng);
      l.assign(pool.begin(), pool.begin() + rng() % 25);
    }
    const RrfParams p{1.0 + rng() % 60, 1 + rng() % 30};
    const auto expected = oracle::rrf(lists, p.rank_constant, p.window);
    const auto got = rrf_fuse(lists, p);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got[i].score - expected[i].score) <= 1e-12);
    }
    std::reverse(lists.begin(), lists.end());
    CHECK(rrf_fuse(lists, p) == got);
  }
}

TEST_CASE("overlap stub reranker") {
  const auto tok = Tokenizer::whitespace(NormalizationConfig{});
  const Document d{"x", "Virus spread in schools", ""};
  CHECK(overlap_stub_score("virus spread", d, tok) == 1.0);
  CHECK(overlap_stub_score("virus virus economy", d, tok) == doctest::Approx(0.5));
  CHECK(overlap_stub_score("", d, tok) == 0.0);
  CHECK(overlap_stub_score("!!!", d, tok) == 0.0);
}

TEST_CASE("rerank returns top_n by score then id") {
  const Corpus c({{"a", "alpha beta", ""}, {"b", "alpha", ""}, {"c", "gamma", ""}, {"d", "alpha beta", ""}});
  const auto tok = Tokenizer::whitespace(NormalizationConfig{});
  OverlapStubReranker r(tok);
  const auto cands = branch({"c", "b", "d", "a"}, Source::lexical);
  const auto top = rerank(r, "alpha beta", cands, c, 3);
  CHECK(ids_of(top) == std::vector<std::string>{"a", "d", "b"});
  CHECK(top[2].score == doctest::Approx(0.5));
  CHECK(rerank(r, "alpha", cands, c, 10).size() == 4);
  CHECK(rerank(r, "alpha", {}, c, 5).empty());
  CHECK_THROWS_AS(rerank(r, "alpha", branch({"zz"}, Source::lexical), c, 5), DataError);
}

TEST_CASE("rerank surfaces a scorer that miscounts") {
  struct Short : Reranker {
    std::vector<double> score(std::string_view, std::span<const Pair> docs) override {
      return std::vector<double>(docs.size() - 1, 0.0);
    }
    std::string fingerprint() const override { return "short"; }
  } bad;
  const Corpus c({{"a", "x", ""}, {"b", "y", ""}});
  CHECK_THROWS_AS(rerank(bad, "q", branch({"a", "b"}, Source::lexical), c, 5), ProviderError);
}

TEST_CASE("reranker config") {
  CHECK(parse_reranker_mode("stub") == RerankerMode::overlap_stub);
  CHECK(parse_reranker_mode("service") == RerankerMode::service);
  RerankerConfig rc;
  rc.batch_size = 0;
  CHECK_THROWS_AS(rc.validate(), UsageError);
}
