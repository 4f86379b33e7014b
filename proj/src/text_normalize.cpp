#include "sciret/text_normalize.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <vector>

#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"

namespace sciret {
namespace {

using CodePoints = std::vector<UChar32>;

CodePoints decode(std::string_view s) {
  CodePoints out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0) out.push_back(c);
  }
  return out;
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  std::int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<std::uint8_t*>(buf), n, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buf, static_cast<std::size_t>(n));
}

bool is_separator(UChar32 c) {
  return u_isUWhiteSpace(c) || u_charType(c) == U_CONTROL_CHAR;
}

bool is_punct_or_symbol(UChar32 c) {
  switch (u_charType(c)) {
    case U_CONNECTOR_PUNCTUATION:
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return true;
    default:
      return false;
  }
}

bool has_prefix_ci(const CodePoints& word, std::string_view ascii_prefix) {
  if (word.size() < ascii_prefix.size()) return false;
  for (std::size_t i = 0; i < ascii_prefix.size(); ++i) {
    if (u_tolower(word[i]) != static_cast<UChar32>(ascii_prefix[i])) return false;
  }
  return true;
}

bool is_url(const CodePoints& word) {
  return has_prefix_ci(word, "http://") || has_prefix_ci(word, "https://") ||
         has_prefix_ci(word, "www.");
}

}  // namespace

HashtagPolicy parse_hashtag_policy(std::string_view name) {
  if (name == "strip_marker") return HashtagPolicy::strip_marker;
  if (name == "drop_token") return HashtagPolicy::drop_token;
  if (name == "keep") return HashtagPolicy::keep;
  throw UsageError("unknown hashtag policy '" + std::string(name) + "'");
}

std::string_view to_string(HashtagPolicy p) {
  switch (p) {
    case HashtagPolicy::strip_marker: return "strip_marker";
    case HashtagPolicy::drop_token: return "drop_token";
    case HashtagPolicy::keep: return "keep";
  }
  return "?";
}

NormalizationConfig NormalizationConfig::raw() {
  NormalizationConfig cfg;
  cfg.lowercase = false;
  cfg.strip_punctuation = false;
  cfg.preserved_symbols.clear();
  cfg.hashtag_policy = HashtagPolicy::keep;
  cfg.strip_urls = false;
  return cfg;
}

std::uint64_t NormalizationConfig::fingerprint() const {
  return Fingerprinter()
      .add_u64(lowercase)
      .add_u64(strip_punctuation)
      .add(preserved_symbols)
      .add(to_string(hashtag_policy))
      .add_u64(strip_urls)
      .value();
}

namespace {

// One pass of the per-word rules. Returns an empty vector when the word is
// dropped entirely.
CodePoints transform_word(const CodePoints& word, const NormalizationConfig& cfg,
                          const CodePoints& preserved) {
  auto begin = word.begin();
  if (begin != word.end() && *begin == U'#') {
    if (cfg.hashtag_policy == HashtagPolicy::drop_token) return {};
    if (cfg.hashtag_policy == HashtagPolicy::strip_marker) {
      while (begin != word.end() && *begin == U'#') ++begin;
    }
  }
  // URL check runs after the marker is stripped, so "#www.x" and "www.x"
  // are treated alike.
  const CodePoints body(begin, word.end());
  if (cfg.strip_urls && is_url(body)) return {};

  CodePoints out;
  out.reserve(body.size());
  for (UChar32 c : body) {
    if (cfg.lowercase) c = u_tolower(c);
    if (cfg.strip_punctuation && is_punct_or_symbol(c) &&
        std::find(preserved.begin(), preserved.end(), c) == preserved.end()) {
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string normalize_text(std::string_view raw, const NormalizationConfig& cfg) {
  const CodePoints preserved = decode(cfg.preserved_symbols);
  const CodePoints cps = decode(raw);

  std::string out;
  out.reserve(raw.size());
  CodePoints word;

  auto flush = [&] {
    if (word.empty()) return;
    // Iterate to a fixed point: stripping punctuation can expose a new
    // leading '#' or URL prefix when those characters are preserved.
    CodePoints cur = std::move(word);
    word.clear();
    while (!cur.empty()) {
      CodePoints next = transform_word(cur, cfg, preserved);
      if (next == cur) break;
      cur = std::move(next);
    }
    if (cur.empty()) return;
    if (!out.empty()) out += ' ';
    for (UChar32 c : cur) append_utf8(out, c);
  };

  for (UChar32 c : cps) {
    if (is_separator(c)) {
      flush();
    } else {
      word.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace sciret
