#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sciret/augment.hpp"
#include "sciret/corpus.hpp"
#include "sciret/embedding.hpp"
#include "sciret/inverted_index.hpp"
#include "sciret/metrics.hpp"
#include "sciret/rerank.hpp"
#include "sciret/run_config.hpp"
#include "sciret/tokenizer.hpp"
#include "sciret/vector_store.hpp"

namespace sciret {

/// Everything produced for one query.
struct QueryResult {
  std::string query_id;
  /// Final ranking: top_n after re-ranking, the fused list for RRF, or the
  /// branch list for single-branch runs.
  std::vector<ScoredDoc> ranking;
  std::vector<std::string> lexical_ids;
  std::vector<std::string> semantic_ids;
  /// Merged candidate set (rerank and rrf modes).
  std::vector<std::string> candidate_ids;
};

struct PipelineOutput {
  std::vector<QueryResult> results;
  /// Present when the query set carries gold ids.
  std::optional<EvalReport> report;
};

/// Shares tokenizers, indexes and vector stores between configurations that
/// agree on the settings each artifact depends on. Thread-safe.
class ResourceCache {
 public:
  std::shared_ptr<const Tokenizer> tokenizer(const RunConfig& cfg, const Corpus& corpus);
  std::shared_ptr<const InvertedIndex> index(const RunConfig& cfg, const Corpus& corpus,
                                             const Tokenizer& tokenizer);
  std::shared_ptr<const VectorStore> store(const RunConfig& cfg, const Corpus& corpus,
                                           const Tokenizer& tokenizer,
                                           EmbeddingProvider& provider, TextGenerator* gen);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Tokenizer>> tokenizers_;
  std::map<std::string, std::shared_ptr<const InvertedIndex>> indexes_;
  std::map<std::string, std::shared_ptr<const VectorStore>> stores_;
};

/// Trains or loads the tokenizer described by `cfg`. BPE is trained on the
/// normalized document texts.
Tokenizer build_tokenizer(const RunConfig& cfg, const Corpus& corpus);

/// Appends summary and synthetic-post rows for every document. File-backed
/// providers look the rows up as "<doc_id>#summary" and "<doc_id>#tweet".
void add_augmented_rows(VectorStore& store, const Corpus& corpus, EmbeddingProvider& provider,
                        TextGenerator& gen);

/// A configured retrieval pipeline bound to one corpus.
class Pipeline {
 public:
  Pipeline(RunConfig cfg, const Corpus& corpus, ResourceCache* cache = nullptr);

  /// Runs every query; a failing query aborts the run with its id.
  PipelineOutput run(const QuerySet& queries) const;
  QueryResult run_query(const Query& q) const;

  /// Evaluation report over finished results. Throws DataError when golds
  /// are missing or do not resolve in the corpus.
  EvalReport evaluate(const QuerySet& queries, const std::vector<QueryResult>& results) const;

  const RunConfig& config() const { return cfg_; }
  const Tokenizer& tokenizer() const { return *tokenizer_; }
  const InvertedIndex* index() const { return index_.get(); }
  const VectorStore* store() const { return store_.get(); }

 private:
  bool uses_lexical() const;
  bool uses_semantic() const;
  EmbeddingVector query_vector(const Query& q) const;

  RunConfig cfg_;
  const Corpus& corpus_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  std::shared_ptr<const InvertedIndex> index_;
  std::shared_ptr<const VectorStore> store_;
  std::unique_ptr<EmbeddingProvider> doc_embedder_;
  std::unique_ptr<EmbeddingProvider> query_embedder_;
  std::unique_ptr<Reranker> reranker_;
  std::unique_ptr<TextGenerator> generator_;
};

/// Builds a pipeline for `cfg` and runs it.
PipelineOutput run_pipeline(const RunConfig& cfg, const Corpus& corpus, const QuerySet& queries);

struct AblationRow {
  std::string label;
  RunConfig config;
};

/// One report per row, in grid order. Artifacts are shared across rows.
std::vector<EvalReport> run_ablation(const std::vector<AblationRow>& grid, const Corpus& corpus,
                                     const QuerySet& queries);

/// lexical-only, semantic-only, RRF and full re-rank rows derived from `base`.
std::vector<AblationRow> default_ablation_grid(const RunConfig& base);

}  // namespace sciret
