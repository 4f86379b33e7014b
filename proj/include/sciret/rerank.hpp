#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sciret/candidate.hpp"
#include "sciret/corpus.hpp"
#include "sciret/tokenizer.hpp"

namespace sciret {

enum class RerankerMode { service, overlap_stub };
RerankerMode parse_reranker_mode(std::string_view name);
std::string_view to_string(RerankerMode mode);

struct RerankerConfig {
  RerankerMode mode = RerankerMode::overlap_stub;
  std::string endpoint;
  std::size_t batch_size = 16;
  /// Batches of one query in flight at once (service mode).
  std::size_t max_concurrency = 4;

  void validate() const;
};

/// Pairwise relevance scorer: one score per (query, document text) pair.
class Reranker {
 public:
  virtual ~Reranker() = default;

  struct Pair {
    std::string id;
    std::string text;
  };

  /// Scores in input order. Scores are comparable only within one call.
  virtual std::vector<double> score(std::string_view query, std::span<const Pair> docs) = 0;
  virtual std::string fingerprint() const = 0;
};

/// |query tokens ∩ doc tokens| / |query tokens| over token sets. 0 for an
/// empty query.
double overlap_stub_score(std::string_view query_text, const Document& doc,
                          const Tokenizer& tokenizer);
double overlap_stub_score(std::string_view query_text, const Document& doc,
                          const BpeVocab& vocab, const NormalizationConfig& cfg);

class OverlapStubReranker final : public Reranker {
 public:
  explicit OverlapStubReranker(Tokenizer tokenizer) : tokenizer_(std::move(tokenizer)) {}

  std::vector<double> score(std::string_view query, std::span<const Pair> docs) override;
  std::string fingerprint() const override;

 private:
  Tokenizer tokenizer_;
};

/// POST /rerank {query, candidates: [{id, text}]} -> {scores, model_fingerprint}.
/// Requests are chunked by batch_size and reassembled by position.
class ServiceReranker final : public Reranker {
 public:
  ServiceReranker(std::string endpoint, std::size_t batch_size, std::size_t max_concurrency);

  std::vector<double> score(std::string_view query, std::span<const Pair> docs) override;
  std::string fingerprint() const override { return "service:" + model_fingerprint_; }

 private:
  std::vector<double> score_batch(std::string_view query, std::span<const Pair> docs) const;

  std::string endpoint_;
  std::size_t batch_size_;
  std::size_t max_concurrency_;
  std::string model_fingerprint_;
};

std::unique_ptr<Reranker> make_reranker(const RerankerConfig& cfg, const Tokenizer& tokenizer);

/// Rescores every candidate on (query_text, doc_text) and returns the best
/// min(top_n, |candidates|), score descending then doc_id ascending. Branch
/// ranks and scores play no part. Throws DataError for ids missing from the
/// corpus and ProviderError when the scorer returns the wrong count.
std::vector<ScoredDoc> rerank(Reranker& reranker, std::string_view query_text,
                              const std::vector<Candidate>& candidates, const Corpus& corpus,
                              std::size_t top_n = 5);

}  // namespace sciret
