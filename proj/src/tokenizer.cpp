#include "sciret/tokenizer.hpp"

#include "sciret/hashing.hpp"

namespace sciret {
namespace {

template <typename Fn>
void for_each_word(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find(' ', start);
    const auto stop = end == std::string_view::npos ? text.size() : end;
    if (stop > start) fn(text.substr(start, stop - start));
    start = stop + 1;
  }
}

}  // namespace

Tokenizer Tokenizer::whitespace(NormalizationConfig cfg) {
  return Tokenizer(std::move(cfg), std::nullopt);
}

Tokenizer Tokenizer::bpe(NormalizationConfig cfg, BpeVocab vocab) {
  return Tokenizer(std::move(cfg), std::move(vocab));
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  const std::string normalized = normalize_text(text, cfg_);
  std::vector<std::string> tokens;
  for_each_word(normalized, [&](std::string_view word) {
    if (vocab_) {
      for (auto& sym : vocab_->segment(word)) tokens.push_back(std::move(sym));
    } else {
      tokens.emplace_back(word);
    }
  });
  return tokens;
}

std::uint64_t Tokenizer::fingerprint() const {
  Fingerprinter fp;
  fp.add_u64(cfg_.fingerprint()).add(vocab_ ? "bpe" : "whitespace");
  if (vocab_) fp.add_u64(vocab_->fingerprint());
  return fp.value();
}

std::vector<std::string> tokenize(std::string_view text, const BpeVocab& vocab,
                                  const NormalizationConfig& cfg) {
  return Tokenizer::bpe(cfg, vocab).tokenize(text);
}

}  // namespace sciret
