#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sciret/augment.hpp"
#include "sciret/embedding.hpp"
#include "sciret/fusion.hpp"
#include "sciret/inverted_index.hpp"
#include "sciret/rerank.hpp"
#include "sciret/text_normalize.hpp"

namespace sciret {

enum class FusionMode { rerank, rrf, lexical_only, semantic_only };
FusionMode parse_fusion_mode(std::string_view name);
std::string_view to_string(FusionMode mode);

enum class TokenizerKind { bpe, whitespace };
TokenizerKind parse_tokenizer_kind(std::string_view name);
std::string_view to_string(TokenizerKind kind);

enum class QueryAugmentation { none, rewrite, expand };
QueryAugmentation parse_query_augmentation(std::string_view name);
std::string_view to_string(QueryAugmentation mode);

/// Every tunable of the pipeline. Serialized as one flat JSON object; keys
/// are documented in the README.
struct RunConfig {
  NormalizationConfig normalization;
  TokenizerKind tokenizer = TokenizerKind::bpe;
  std::size_t vocab_size = 30000;
  Bm25Params bm25;

  std::size_t lex_k = 30;
  std::size_t sem_k = 100;
  std::size_t top_n = 5;
  /// List length for lexical-only and semantic-only runs.
  std::size_t eval_depth = 100;
  FusionMode fusion = FusionMode::rerank;
  RrfParams rrf;

  EmbeddingMode embedding = EmbeddingMode::hash_test;
  std::string embedding_endpoint;
  /// 0: provider default (256 for hash, file header for file).
  std::size_t embedding_dim = 0;
  std::size_t embedding_batch_size = 32;
  std::filesystem::path embeddings_path;
  std::filesystem::path query_embeddings_path;

  RerankerConfig reranker;

  QueryAugmentation query_augmentation = QueryAugmentation::none;
  bool hyde = false;
  bool additional_documents = false;
  GenerationMode generator = GenerationMode::canned;
  std::string generator_endpoint;
  std::filesystem::path generator_fixture;

  std::filesystem::path lexical_index_path;
  std::filesystem::path merges_path;

  /// Query-level parallelism; 0 = hardware concurrency. Not part of the
  /// fingerprint since results do not depend on it.
  unsigned threads = 0;

  /// Lexical-only run with whitespace tokens and no normalization, the way
  /// the task organizers' baseline tokenizes.
  static RunConfig baseline_bm25();
  /// Lexical-only run with full normalization and BPE.
  static RunConfig preprocessed_bm25();

  bool needs_generator() const;
  /// Throws UsageError on inconsistent settings.
  void validate() const;

  nlohmann::json to_json() const;
  /// Applies the keys present in `j` on top of `base`. Unknown keys and
  /// wrongly typed values throw UsageError.
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path, RunConfig base);
  static RunConfig load(const std::filesystem::path& path);

  /// Hex hash of the canonical JSON (keys sorted), excluding `threads`.
  std::string fingerprint() const;
};

}  // namespace sciret
