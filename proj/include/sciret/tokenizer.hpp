#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sciret/bpe.hpp"
#include "sciret/text_normalize.hpp"

namespace sciret {

/// Normalization followed by either BPE segmentation or a plain whitespace
/// split. Immutable; safe to share across threads.
class Tokenizer {
 public:
  static Tokenizer whitespace(NormalizationConfig cfg);
  static Tokenizer bpe(NormalizationConfig cfg, BpeVocab vocab);

  std::vector<std::string> tokenize(std::string_view text) const;

  const NormalizationConfig& normalization() const { return cfg_; }
  const std::optional<BpeVocab>& vocab() const { return vocab_; }
  bool is_bpe() const { return vocab_.has_value(); }
  std::uint64_t fingerprint() const;

 private:
  Tokenizer(NormalizationConfig cfg, std::optional<BpeVocab> vocab)
      : cfg_(std::move(cfg)), vocab_(std::move(vocab)) {}

  NormalizationConfig cfg_;
  std::optional<BpeVocab> vocab_;
};

/// normalize_text, then BPE merges within each whitespace word.
std::vector<std::string> tokenize(std::string_view text, const BpeVocab& vocab,
                                  const NormalizationConfig& cfg);

}  // namespace sciret
