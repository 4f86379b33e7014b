#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sciret/candidate.hpp"
#include "sciret/corpus.hpp"
#include "sciret/tokenizer.hpp"

namespace sciret {

/// Okapi BM25 constants.
struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;

  /// Throws UsageError unless k1 >= 0 and 0 <= b <= 1.
  void validate() const;
  bool operator==(const Bm25Params&) const = default;
};

struct Posting {
  std::uint32_t doc = 0;
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Postings, document frequencies and lengths for BM25 scoring.
/// Terms are stored in sorted order so equal inputs give equal indexes
/// regardless of how the build was scheduled.
class InvertedIndex {
 public:
  /// Tokenizes every doc_text(d) with `tokenizer`. `threads` = 0 picks
  /// hardware concurrency.
  static InvertedIndex build(const Corpus& corpus, const Tokenizer& tokenizer,
                             Bm25Params params, unsigned threads = 0);

  std::size_t num_docs() const { return doc_len_.size(); }
  std::size_t num_terms() const { return terms_.size(); }
  double avgdl() const { return avgdl_; }
  std::uint32_t doc_len(std::size_t doc) const { return doc_len_.at(doc); }
  const std::string& doc_id(std::size_t doc) const { return doc_ids_.at(doc); }
  const Bm25Params& params() const { return params_; }

  std::size_t df(std::string_view term) const;
  /// ln(1 + (N - df + 0.5) / (df + 0.5)); positive for every df <= N.
  double idf(std::string_view term) const;
  /// Empty span for unknown terms.
  const std::vector<Posting>& postings(std::string_view term) const;
  std::optional<std::uint32_t> term_id(std::string_view term) const;
  const std::vector<std::string>& terms() const { return terms_; }

  /// Sum over query tokens of idf * tf*(k1+1) / (tf + k1*(1 - b + b*len/avgdl)).
  /// Repeated query tokens contribute repeatedly. Throws std::out_of_range
  /// for an invalid position.
  double score(const std::vector<std::string>& query_tokens, std::size_t doc) const;

  /// Scores for every document, accumulated term by term in query order.
  std::vector<double> score_all(const std::vector<std::string>& query_tokens) const;

  std::uint64_t corpus_fingerprint() const { return corpus_fingerprint_; }
  std::uint64_t tokenizer_fingerprint() const { return tokenizer_fingerprint_; }
  /// Hash over every stored field.
  std::uint64_t fingerprint() const;

  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

  bool operator==(const InvertedIndex& other) const;

 private:
  double term_weight(std::uint32_t tf, std::uint32_t len) const;

  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_len_;
  double avgdl_ = 0.0;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::vector<Posting>> postings_;
  Bm25Params params_;
  std::uint64_t corpus_fingerprint_ = 0;
  std::uint64_t tokenizer_fingerprint_ = 0;
};

/// Convenience wrapper matching the index contract in terms of token lists.
double bm25_score(const InvertedIndex& index, const std::vector<std::string>& query_tokens,
                  std::size_t doc);

/// Top-k documents with positive BM25 score, score descending, doc_id
/// ascending on ties. Candidates carry source=lexical and 1-based rank.
std::vector<Candidate> lexical_topk(const InvertedIndex& index, const Tokenizer& tokenizer,
                                    std::string_view query, std::size_t k = 30);

/// Same, from pre-tokenized query.
std::vector<Candidate> lexical_topk_tokens(const InvertedIndex& index,
                                           const std::vector<std::string>& query_tokens,
                                           std::size_t k);

}  // namespace sciret
