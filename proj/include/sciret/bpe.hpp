#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sciret {

/// Suffix attached to the final symbol of every word.
inline constexpr std::string_view kEndOfWord = "</w>";

using MergePair = std::pair<std::string, std::string>;

/// Learned byte-pair merges, in training priority order.
class BpeVocab {
 public:
  BpeVocab() = default;
  BpeVocab(std::vector<MergePair> merges, std::size_t alphabet_size,
           std::uint64_t trained_on);

  const std::vector<MergePair>& merges() const { return merges_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  /// Base symbols plus one symbol per merge.
  std::size_t vocab_size() const { return alphabet_size_ + merges_.size(); }
  std::uint64_t trained_on() const { return trained_on_; }
  std::uint64_t fingerprint() const;

  /// Splits one whitespace-free word into subword symbols. The last symbol
  /// carries the end-of-word suffix.
  std::vector<std::string> segment(std::string_view word) const;

  /// Rank of a merge, or -1 when the pair was never learned.
  long rank(std::string_view left, std::string_view right) const;

  bool operator==(const BpeVocab& other) const {
    return merges_ == other.merges_ && alphabet_size_ == other.alphabet_size_ &&
           trained_on_ == other.trained_on_;
  }

 private:
  std::vector<MergePair> merges_;
  std::size_t alphabet_size_ = 0;
  std::uint64_t trained_on_ = 0;
  std::unordered_map<std::string, long> ranks_;
};

/// Splits a word into code points, suffixing the last one with "</w>".
std::vector<std::string> initial_symbols(std::string_view word);

/// Greedy BPE training on already-normalized texts. Repeatedly merges the
/// most frequent adjacent pair (ties: lexicographically smallest pair) until
/// `vocab_size` symbols exist or no pair occurs at least twice.
/// Throws UsageError when texts are empty or vocab_size does not exceed the
/// alphabet.
BpeVocab train_bpe(const std::vector<std::string>& texts, std::size_t vocab_size);

/// Plain-text merges file: a "#version" header line, then one
/// "left right" pair per line in training order.
void save_merges(const BpeVocab& vocab, const std::filesystem::path& path);
BpeVocab load_merges(const std::filesystem::path& path);

}  // namespace sciret
