#include <random>

#include "doctest.h"
#include "sciret/text_normalize.hpp"

using namespace sciret;

TEST_CASE("normalization examples") {
  const NormalizationConfig cfg;
  CHECK(normalize_text("Game changer!! 45% improvement", cfg) == "game changer 45% improvement");
  CHECK(normalize_text("", cfg).empty());
  CHECK(normalize_text("#Alzheimers study http://t.co/x", cfg) == "alzheimers study");
  CHECK(normalize_text("  many\t\tspaces\n\nhere ", cfg) == "many spaces here");
  CHECK(normalize_text("Visit www.example.org NOW", cfg) == "visit now");
  CHECK(normalize_text("COVID-19: 2-4% drop", cfg) == "covid19 24% drop");
  CHECK(normalize_text("... --- !!!", cfg).empty());
}

TEST_CASE("unicode punctuation, symbols and case") {
  const NormalizationConfig cfg;
  CHECK(normalize_text("\xC2\xBFQu\xC3\x89 pas\xC3\xB3?", cfg) == "qu\xC3\xA9 pas\xC3\xB3");
  CHECK(normalize_text("caf\xC3\xA9 \xE2\x80\x9Cquoted\xE2\x80\x9D \xE2\x86\x92 arrow", cfg) ==
        "caf\xC3\xA9 quoted arrow");
  // Non-breaking space separates words.
  CHECK(normalize_text("a\xC2\xA0" "b", cfg) == "a b");
}

TEST_CASE("hashtag policies") {
  NormalizationConfig cfg;
  cfg.hashtag_policy = HashtagPolicy::drop_token;
  CHECK(normalize_text("#COVID19 vaccines #work", cfg) == "vaccines");
  cfg.hashtag_policy = HashtagPolicy::keep;
  cfg.preserved_symbols = "#%";
  CHECK(normalize_text("#COVID19 vaccines", cfg) == "#covid19 vaccines");
  cfg.hashtag_policy = HashtagPolicy::strip_marker;
  CHECK(normalize_text("#COVID19 vaccines", cfg) == "covid19 vaccines");
}

TEST_CASE("toggles") {
  NormalizationConfig cfg = NormalizationConfig::raw();
  CHECK(normalize_text("Keep #This, http://x.y  AS-IS!", cfg) == "Keep #This, http://x.y AS-IS!");
  cfg.lowercase = true;
  CHECK(normalize_text("ABC dEf", cfg) == "abc def");
  NormalizationConfig no_url;
  no_url.strip_urls = false;
  CHECK(normalize_text("see https://t.co/ab", no_url) == "see httpstcoab");
}

TEST_CASE("normalization is idempotent on random text") {
  const std::vector<std::string> pieces = {
      "a", "Z", "7", " ", "  ", "\t", "#", "%", "!", "-", ".", "http://", "https://", "www.",
      "\xC3\x89", "\xE2\x80\x9C", "\xC2\xA0", "\xE2\x82\xAC", "##", "#x", "/", ":", "_", "@",
      "\xF0\x9F\x98\x80", "\xCE\xA3", "I\xCC\x87"};
  std::mt19937 rng(17);
  std::vector<NormalizationConfig> cfgs(4);
  cfgs[1].hashtag_policy = HashtagPolicy::drop_token;
  cfgs[2].hashtag_policy = HashtagPolicy::keep;
  cfgs[2].preserved_symbols = "#%";
  cfgs[3] = NormalizationConfig::raw();
  for (int iter = 0; iter < 3000; ++iter) {
    std::string s;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    for (const auto& cfg : cfgs) {
      const auto once = normalize_text(s, cfg);
      INFO("input: " << s);
      CHECK(normalize_text(once, cfg) == once);
      CHECK(once.find("  ") == std::string::npos);
    }
  }
}

TEST_CASE("config fingerprint tracks every field") {
  NormalizationConfig a;
  NormalizationConfig b;
  CHECK(a.fingerprint() == b.fingerprint());
  b.preserved_symbols = "%$";
  CHECK(a.fingerprint() != b.fingerprint());
  CHECK(parse_hashtag_policy(to_string(HashtagPolicy::drop_token)) == HashtagPolicy::drop_token);
}
