#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sciret {

enum class HashtagPolicy {
  strip_marker,  // "#Alzheimers" -> "alzheimers"
  drop_token,    // "#Alzheimers" -> ""
  keep,          // leave the marker for the punctuation rule to decide
};

HashtagPolicy parse_hashtag_policy(std::string_view name);
std::string_view to_string(HashtagPolicy p);

struct NormalizationConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  /// UTF-8 characters exempt from punctuation stripping.
  std::string preserved_symbols = "%";
  HashtagPolicy hashtag_policy = HashtagPolicy::strip_marker;
  bool strip_urls = true;

  /// No lowercasing, no stripping. Whitespace is still collapsed.
  static NormalizationConfig raw();

  std::uint64_t fingerprint() const;
  bool operator==(const NormalizationConfig&) const = default;
};

/// Lowercase, drop URLs, apply the hashtag policy, remove Unicode punctuation
/// and symbols (keeping `preserved_symbols`), collapse whitespace to single
/// spaces. Idempotent. Input must be valid UTF-8; invalid bytes are dropped.
std::string normalize_text(std::string_view raw, const NormalizationConfig& cfg);

}  // namespace sciret
