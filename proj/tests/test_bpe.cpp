#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sciret/bpe.hpp"
#include "sciret/errors.hpp"
#include "sciret/text_normalize.hpp"
#include "sciret/tokenizer.hpp"
#include "test_util.hpp"

using namespace sciret;

namespace {

std::map<std::string, long long> word_counts(const std::vector<std::string>& texts) {
  std::map<std::string, long long> freq;
  for (const auto& t : texts) {
    std::istringstream in(t);
    std::string w;
    while (in >> w) ++freq[w];
  }
  return freq;
}

}  // namespace

TEST_CASE("initial symbols mark the word end") {
  CHECK(initial_symbols("low") == std::vector<std::string>{"l", "o", "w</w>"});
  CHECK(initial_symbols("\xC3\xA9t") == std::vector<std::string>{"\xC3\xA9", "t</w>"});
}

TEST_CASE("low low lower") {
  // Pairs: (l,o) x3, (o,w</w>) x2, (o,w) x1, (w,e) x1, (e,r</w>) x1.
  // Alphabet: l o w</w> w e r</w>.
  const BpeVocab v = train_bpe({"low low lower"}, 6 + 2);
  REQUIRE(v.alphabet_size() == 6);
  REQUIRE(v.merges().size() == 2);
  CHECK(v.merges()[0] == MergePair{"l", "o"});
  CHECK(v.merges()[1] == MergePair{"lo", "w</w>"});
  CHECK(v.segment("low") == std::vector<std::string>{"low</w>"});
  CHECK(v.segment("lower") == std::vector<std::string>{"lo", "w", "e", "r</w>"});
  CHECK(v.vocab_size() == 8);
}

TEST_CASE("nothing to merge") {
  const BpeVocab v = train_bpe({"a"}, 5);
  CHECK(v.merges().empty());
  CHECK(v.vocab_size() == v.alphabet_size());
  CHECK_THROWS_AS(train_bpe({"abc"}, 3), UsageError);
  CHECK_THROWS_AS(train_bpe({}, 10), UsageError);
}

TEST_CASE("frequency scaling leaves merges unchanged") {
  const std::vector<std::string> base = {"the virus spreads", "the viral spread of virus",
                                         "spreading viruses"};
  const auto reference = train_bpe(base, 60).merges();
  // Doubling every count can lift a pair seen once over the count-2 floor,
  // so invariance is checked among multiples of at least two.
  const auto twice = [&](int k) {
    std::vector<std::string> texts;
    for (int i = 0; i < k; ++i) texts.insert(texts.end(), base.begin(), base.end());
    return train_bpe(texts, 60).merges();
  };
  CHECK(twice(2) == twice(3));
  CHECK(twice(2) == twice(7));
  CHECK(reference.size() <= twice(2).size());
}

TEST_CASE("incremental trainer matches a full-recount oracle") {
  std::mt19937 rng(5);
  const std::string letters = "abcdeab";
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<std::string> texts;
    const int n_texts = 1 + static_cast<int>(rng() % 5);
    for (int t = 0; t < n_texts; ++t) {
      std::string text;
      const int words = 1 + static_cast<int>(rng() % 8);
      for (int w = 0; w < words; ++w) {
        if (w) text += ' ';
        const int len = 1 + static_cast<int>(rng() % 6);
        for (int c = 0; c < len; ++c) text += letters[rng() % letters.size()];
      }
      texts.push_back(text);
    }
    const auto freq = word_counts(texts);
    std::set<std::string> alphabet;
    for (const auto& [w, f] : freq) {
      for (const auto& s : oracle::bpe_symbols(w)) alphabet.insert(s);
    }
    const std::size_t budget = alphabet.size() + 1 + rng() % 20;
    const auto expected = oracle::bpe_train(freq, budget);
    const BpeVocab v = train_bpe(texts, budget);
    INFO("iteration " << iter);
    REQUIRE(v.merges() == expected);
    CHECK(v.alphabet_size() == alphabet.size());
    for (const auto& [w, f] : freq) CHECK(v.segment(w) == oracle::bpe_segment(w, expected));
    CHECK(v.segment("eeaabbzz") == oracle::bpe_segment("eeaabbzz", expected));
  }
}

TEST_CASE("merges file round trip and determinism") {
  testutil::TempDir dir;
  const std::vector<std::string> texts = {"mask masks masking masked", "vaccine vaccines vaccinated"};
  const BpeVocab a = train_bpe(texts, 40);
  const BpeVocab b = train_bpe(texts, 40);
  save_merges(a, dir / "a.txt");
  save_merges(b, dir / "b.txt");
  CHECK(testutil::read_file(dir / "a.txt") == testutil::read_file(dir / "b.txt"));
  const BpeVocab loaded = load_merges(dir / "a.txt");
  CHECK(loaded == a);
  CHECK(loaded.fingerprint() == a.fingerprint());
  CHECK(loaded.segment("masker") == a.segment("masker"));

  testutil::write_file(dir / "bad.txt", "not a merges file\n");
  CHECK_THROWS_AS(load_merges(dir / "bad.txt"), DataError);
}

TEST_CASE("tokenizer") {
  const NormalizationConfig cfg;
  const BpeVocab v = train_bpe({"low low lower"}, 8);
  const auto tok = Tokenizer::bpe(cfg, v);
  CHECK(tok.tokenize("").empty());
  CHECK(tok.tokenize("LOW!") == std::vector<std::string>{"low</w>"});
  CHECK(tokenize("lower low", v, cfg) ==
        std::vector<std::string>{"lo", "w", "e", "r</w>", "low</w>"});
  // Held-out word, hand-run: b,l,o,w</w> -> (l,o) rank 0 -> b,lo,w</w> -> (lo,w</w>) rank 1.
  CHECK(tok.tokenize("blow") == std::vector<std::string>{"b", "low</w>"});
  const auto ws = Tokenizer::whitespace(cfg);
  CHECK(ws.tokenize("The virus, the VIRUS.") ==
        std::vector<std::string>{"the", "virus", "the", "virus"});
  CHECK(ws.fingerprint() != tok.fingerprint());
}
