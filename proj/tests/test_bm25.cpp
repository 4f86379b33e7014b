#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sciret/errors.hpp"
#include "sciret/inverted_index.hpp"
#include "sciret/tokenizer.hpp"
#include "test_util.hpp"

using namespace sciret;

namespace {

const Tokenizer& ws() {
  static const Tokenizer t = Tokenizer::whitespace(NormalizationConfig{});
  return t;
}

Corpus fixture_corpus() { return load_corpus(testutil::fixture("bm25_corpus.jsonl")); }

}  // namespace

TEST_CASE("three-document fixture statistics") {
  const auto idx = InvertedIndex::build(fixture_corpus(), ws(), {});
  CHECK(idx.num_docs() == 3);
  CHECK(idx.df("virus") == 2);
  CHECK(idx.df("economic") == 1);
  CHECK(idx.df("absent") == 0);
  CHECK(idx.avgdl() == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  CHECK(idx.doc_len(1) == 3);
  CHECK(idx.postings("virus") == std::vector<Posting>{{0, 1}, {1, 2}});
}

TEST_CASE("fixture scores") {
  const auto idx = InvertedIndex::build(fixture_corpus(), ws(), {});
  // ln(1 + 1.5/2.5) * 2 * 2.5 / (2 + 1.5 * (0.25 + 0.75 * 3 / (7/3)))
  const double d2 = std::log(1.6) * 5.0 / (2.0 + 1.5 * (0.25 + 0.75 * 9.0 / 7.0));
  CHECK(bm25_score(idx, {"virus"}, 1) == doctest::Approx(d2).epsilon(1e-12));
  CHECK(d2 == doctest::Approx(0.6149).epsilon(1e-3));
  CHECK(bm25_score(idx, {"virus"}, 0) < bm25_score(idx, {"virus"}, 1));
  CHECK(bm25_score(idx, {"virus"}, 2) == 0.0);
  CHECK(bm25_score(idx, {"nothing"}, 0) == 0.0);
  CHECK(bm25_score(idx, {}, 0) == 0.0);
  CHECK_THROWS_AS((void)idx.score({"virus"}, 3), std::out_of_range);

  const auto top = lexical_topk(idx, ws(), "virus mutation", 30);
  REQUIRE(top.size() == 2);
  CHECK(top[0].doc_id == "d2");
  CHECK(top[1].doc_id == "d1");
  CHECK(top[0].lexical_rank == 1U);
  CHECK(top[1].has(Source::lexical));
  CHECK_FALSE(top[1].has(Source::semantic));
  CHECK(lexical_topk(idx, ws(), "virus", 0).empty());
  CHECK(lexical_topk(idx, ws(), "zebra quantum", 30).empty());
}

TEST_CASE("single-document corpus") {
  const Corpus c({{"only", "alpha beta beta", ""}});
  const auto idx = InvertedIndex::build(c, ws(), {});
  CHECK(idx.avgdl() == 3.0);
  for (const auto& t : idx.terms()) CHECK(idx.df(t) == 1);
}

TEST_CASE("idf floor keeps weights positive and bounded") {
  const auto idx = InvertedIndex::build(fixture_corpus(), ws(), {});
  for (const auto& t : idx.terms()) CHECK(idx.idf(t) > 0.0);

  // Same length documents, increasing tf of one term.
  std::vector<Document> docs;
  for (int tf = 1; tf <= 5; ++tf) {
    std::string title;
    for (int i = 0; i < 6; ++i) title += (i < tf ? "term " : "pad" + std::to_string(i) + " ");
    docs.push_back({"d" + std::to_string(tf), title, ""});
  }
  docs.push_back({"z", "pad1 pad2 pad3 pad4 pad5 pad6", ""});
  const auto idx2 = InvertedIndex::build(Corpus(docs), ws(), {});
  const double bound = idx2.idf("term") * (idx2.params().k1 + 1);
  double prev = 0;
  for (std::size_t d = 0; d < 5; ++d) {
    const double s = bm25_score(idx2, {"term"}, d);
    CHECK(s > prev);
    CHECK(s < bound);
    prev = s;
  }
}

TEST_CASE("repeated query tokens count repeatedly") {
  const auto idx = InvertedIndex::build(fixture_corpus(), ws(), {});
  CHECK(bm25_score(idx, {"virus", "virus"}, 1) ==
        doctest::Approx(2 * bm25_score(idx, {"virus"}, 1)).epsilon(1e-14));
}

TEST_CASE("lexical_topk agrees with brute force on random corpora") {
  std::mt19937 rng(99);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  for (int iter = 0; iter < 40; ++iter) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<Document> docs;
    std::vector<std::vector<std::string>> toks;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> t;
      std::string title;
      const std::size_t len = 1 + rng() % 8;
      for (std::size_t j = 0; j < len; ++j) {
        t.push_back(vocab[rng() % vocab.size()]);
        title += t.back() + " ";
      }
      ids.push_back("doc" + std::to_string(rng() % 1000) + "_" + std::to_string(i));
      docs.push_back({ids.back(), title, ""});
      toks.push_back(t);
    }
    Bm25Params p{0.5 + (rng() % 20) / 10.0, (rng() % 11) / 10.0};
    const auto idx = InvertedIndex::build(Corpus(docs), ws(), p);
    std::vector<std::string> q;
    const std::size_t qlen = 1 + rng() % 4;
    for (std::size_t j = 0; j < qlen; ++j) q.push_back(vocab[rng() % vocab.size()]);
    const std::size_t k = rng() % (n + 3);
    const auto expected = oracle::topk_positive(ids, oracle::bm25_all(toks, q, p.k1, p.b), k);
    const auto got = lexical_topk_tokens(idx, q, k);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].doc_id == expected[i].id);
      CHECK(std::abs(*got[i].lexical_score - expected[i].score) <= 1e-9);
      CHECK(got[i].lexical_rank == i + 1);
    }
  }
}

TEST_CASE("index build is deterministic and persists") {
  const Corpus c = load_corpus(testutil::fixture("mini_corpus.jsonl"));
  const auto tok = Tokenizer::bpe({}, train_bpe({"mask masks transmission respiratory"}, 30));
  const auto one = InvertedIndex::build(c, tok, {}, 1);
  const auto many = InvertedIndex::build(c, tok, {}, 8);
  CHECK(one == many);
  CHECK(one.fingerprint() == many.fingerprint());
  CHECK(one.corpus_fingerprint() == c.fingerprint());
  CHECK(one.tokenizer_fingerprint() == tok.fingerprint());

  testutil::TempDir dir;
  one.save(dir / "idx.bin");
  const auto loaded = InvertedIndex::load(dir / "idx.bin");
  CHECK(loaded == one);
  CHECK(loaded.fingerprint() == one.fingerprint());

  auto bytes = testutil::read_file(dir / "idx.bin");
  bytes[bytes.size() / 2] ^= 0x5A;
  testutil::write_file(dir / "bad.bin", bytes);
  CHECK_THROWS_AS(InvertedIndex::load(dir / "bad.bin"), DataError);
  testutil::write_file(dir / "short.bin", bytes.substr(0, 20));
  CHECK_THROWS_AS(InvertedIndex::load(dir / "short.bin"), DataError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((Bm25Params{-0.1, 0.5}.validate()), UsageError);
  CHECK_THROWS_AS((Bm25Params{1.2, 1.5}.validate()), UsageError);
  CHECK_NOTHROW((Bm25Params{0.0, 0.0}.validate()));
}
