#include "sciret/run_config.hpp"

#include <fstream>
#include <functional>
#include <unordered_map>

#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"

namespace sciret {
namespace {

using json = nlohmann::json;

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw UsageError("config key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw UsageError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

FusionMode parse_fusion_mode(std::string_view name) {
  if (name == "rerank") return FusionMode::rerank;
  if (name == "rrf") return FusionMode::rrf;
  if (name == "lexical") return FusionMode::lexical_only;
  if (name == "semantic") return FusionMode::semantic_only;
  throw UsageError("unknown fusion mode '" + std::string(name) +
                   "' (expected rerank, rrf, lexical or semantic)");
}

std::string_view to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::rerank: return "rerank";
    case FusionMode::rrf: return "rrf";
    case FusionMode::lexical_only: return "lexical";
    case FusionMode::semantic_only: return "semantic";
  }
  return "?";
}

TokenizerKind parse_tokenizer_kind(std::string_view name) {
  if (name == "bpe") return TokenizerKind::bpe;
  if (name == "whitespace") return TokenizerKind::whitespace;
  throw UsageError("unknown tokenizer '" + std::string(name) + "'");
}

std::string_view to_string(TokenizerKind kind) {
  return kind == TokenizerKind::bpe ? "bpe" : "whitespace";
}

QueryAugmentation parse_query_augmentation(std::string_view name) {
  if (name == "none") return QueryAugmentation::none;
  if (name == "rewrite") return QueryAugmentation::rewrite;
  if (name == "expand") return QueryAugmentation::expand;
  throw UsageError("unknown query augmentation '" + std::string(name) + "'");
}

std::string_view to_string(QueryAugmentation mode) {
  switch (mode) {
    case QueryAugmentation::none: return "none";
    case QueryAugmentation::rewrite: return "rewrite";
    case QueryAugmentation::expand: return "expand";
  }
  return "?";
}

RunConfig RunConfig::baseline_bm25() {
  RunConfig cfg;
  cfg.normalization = NormalizationConfig::raw();
  cfg.tokenizer = TokenizerKind::whitespace;
  cfg.fusion = FusionMode::lexical_only;
  return cfg;
}

RunConfig RunConfig::preprocessed_bm25() {
  RunConfig cfg;
  cfg.fusion = FusionMode::lexical_only;
  return cfg;
}

bool RunConfig::needs_generator() const {
  return query_augmentation != QueryAugmentation::none || hyde || additional_documents;
}

void RunConfig::validate() const {
  bm25.validate();
  rrf.validate();
  if (tokenizer == TokenizerKind::bpe && vocab_size < 2) {
    throw UsageError("vocab_size must be at least 2");
  }
  if (top_n == 0) throw UsageError("top_n must be >= 1");
  if (embedding == EmbeddingMode::file && embeddings_path.empty()) {
    throw UsageError("embedding provider 'file' needs embeddings_path");
  }
  if (embedding == EmbeddingMode::file && query_embeddings_path.empty() &&
      fusion != FusionMode::lexical_only) {
    throw UsageError("embedding provider 'file' needs query_embeddings_path");
  }
  if (embedding != EmbeddingMode::file &&
      (!embeddings_path.empty() || !query_embeddings_path.empty())) {
    throw UsageError("embeddings_path is only valid with embedding provider 'file'");
  }
  if (embedding == EmbeddingMode::hash_test && embedding_dim == 1) {
    throw UsageError("hash embedding dim must be >= 2");
  }
  if (embedding_batch_size == 0) throw UsageError("embedding_batch_size must be >= 1");
  if (!lexical_index_path.empty() && tokenizer == TokenizerKind::bpe && merges_path.empty()) {
    throw UsageError("lexical_index_path with a BPE tokenizer also needs merges_path");
  }
  if (needs_generator()) {
    if (generator == GenerationMode::canned && generator_fixture.empty()) {
      throw UsageError("augmentation with the canned generator needs generator_fixture");
    }
  }
}

json RunConfig::to_json() const {
  return json{
      {"lowercase", normalization.lowercase},
      {"strip_punctuation", normalization.strip_punctuation},
      {"preserved_symbols", normalization.preserved_symbols},
      {"hashtag_policy", to_string(normalization.hashtag_policy)},
      {"strip_urls", normalization.strip_urls},
      {"tokenizer", to_string(tokenizer)},
      {"vocab_size", vocab_size},
      {"k1", bm25.k1},
      {"b", bm25.b},
      {"lex_k", lex_k},
      {"sem_k", sem_k},
      {"top_n", top_n},
      {"eval_depth", eval_depth},
      {"fusion", to_string(fusion)},
      {"rrf_constant", rrf.rank_constant},
      {"rrf_window", rrf.window},
      {"embedding_provider", to_string(embedding)},
      {"embedding_endpoint", embedding_endpoint},
      {"embedding_dim", embedding_dim},
      {"embedding_batch_size", embedding_batch_size},
      {"embeddings_path", embeddings_path.string()},
      {"query_embeddings_path", query_embeddings_path.string()},
      {"reranker", to_string(reranker.mode)},
      {"reranker_endpoint", reranker.endpoint},
      {"reranker_batch_size", reranker.batch_size},
      {"reranker_concurrency", reranker.max_concurrency},
      {"query_augmentation", to_string(query_augmentation)},
      {"hyde", hyde},
      {"additional_documents", additional_documents},
      {"generator", to_string(generator)},
      {"generator_endpoint", generator_endpoint},
      {"generator_fixture", generator_fixture.string()},
      {"lexical_index_path", lexical_index_path.string()},
      {"merges_path", merges_path.string()},
      {"threads", threads},
  };
}

RunConfig RunConfig::from_json(const json& j, RunConfig cfg) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;
  static const std::unordered_map<std::string, Setter> setters = {
      {"lowercase", [](RunConfig& c, const json& v, const std::string& k) { c.normalization.lowercase = get_as<bool>(v, k); }},
      {"strip_punctuation", [](RunConfig& c, const json& v, const std::string& k) { c.normalization.strip_punctuation = get_as<bool>(v, k); }},
      {"preserved_symbols", [](RunConfig& c, const json& v, const std::string& k) { c.normalization.preserved_symbols = get_string(v, k); }},
      {"hashtag_policy", [](RunConfig& c, const json& v, const std::string& k) { c.normalization.hashtag_policy = parse_hashtag_policy(get_string(v, k)); }},
      {"strip_urls", [](RunConfig& c, const json& v, const std::string& k) { c.normalization.strip_urls = get_as<bool>(v, k); }},
      {"tokenizer", [](RunConfig& c, const json& v, const std::string& k) { c.tokenizer = parse_tokenizer_kind(get_string(v, k)); }},
      {"vocab_size", [](RunConfig& c, const json& v, const std::string& k) { c.vocab_size = get_count(v, k); }},
      {"k1", [](RunConfig& c, const json& v, const std::string& k) { c.bm25.k1 = get_as<double>(v, k); }},
      {"b", [](RunConfig& c, const json& v, const std::string& k) { c.bm25.b = get_as<double>(v, k); }},
      {"lex_k", [](RunConfig& c, const json& v, const std::string& k) { c.lex_k = get_count(v, k); }},
      {"sem_k", [](RunConfig& c, const json& v, const std::string& k) { c.sem_k = get_count(v, k); }},
      {"top_n", [](RunConfig& c, const json& v, const std::string& k) { c.top_n = get_count(v, k); }},
      {"eval_depth", [](RunConfig& c, const json& v, const std::string& k) { c.eval_depth = get_count(v, k); }},
      {"fusion", [](RunConfig& c, const json& v, const std::string& k) { c.fusion = parse_fusion_mode(get_string(v, k)); }},
      {"rrf_constant", [](RunConfig& c, const json& v, const std::string& k) { c.rrf.rank_constant = get_as<double>(v, k); }},
      {"rrf_window", [](RunConfig& c, const json& v, const std::string& k) { c.rrf.window = get_count(v, k); }},
      {"embedding_provider", [](RunConfig& c, const json& v, const std::string& k) { c.embedding = parse_embedding_mode(get_string(v, k)); }},
      {"embedding_endpoint", [](RunConfig& c, const json& v, const std::string& k) { c.embedding_endpoint = get_string(v, k); }},
      {"embedding_dim", [](RunConfig& c, const json& v, const std::string& k) { c.embedding_dim = get_count(v, k); }},
      {"embedding_batch_size", [](RunConfig& c, const json& v, const std::string& k) { c.embedding_batch_size = get_count(v, k); }},
      {"embeddings_path", [](RunConfig& c, const json& v, const std::string& k) { c.embeddings_path = get_string(v, k); }},
      {"query_embeddings_path", [](RunConfig& c, const json& v, const std::string& k) { c.query_embeddings_path = get_string(v, k); }},
      {"reranker", [](RunConfig& c, const json& v, const std::string& k) { c.reranker.mode = parse_reranker_mode(get_string(v, k)); }},
      {"reranker_endpoint", [](RunConfig& c, const json& v, const std::string& k) { c.reranker.endpoint = get_string(v, k); }},
      {"reranker_batch_size", [](RunConfig& c, const json& v, const std::string& k) { c.reranker.batch_size = get_count(v, k); }},
      {"reranker_concurrency", [](RunConfig& c, const json& v, const std::string& k) { c.reranker.max_concurrency = get_count(v, k); }},
      {"query_augmentation", [](RunConfig& c, const json& v, const std::string& k) { c.query_augmentation = parse_query_augmentation(get_string(v, k)); }},
      {"hyde", [](RunConfig& c, const json& v, const std::string& k) { c.hyde = get_as<bool>(v, k); }},
      {"additional_documents", [](RunConfig& c, const json& v, const std::string& k) { c.additional_documents = get_as<bool>(v, k); }},
      {"generator", [](RunConfig& c, const json& v, const std::string& k) { c.generator = parse_generation_mode(get_string(v, k)); }},
      {"generator_endpoint", [](RunConfig& c, const json& v, const std::string& k) { c.generator_endpoint = get_string(v, k); }},
      {"generator_fixture", [](RunConfig& c, const json& v, const std::string& k) { c.generator_fixture = get_string(v, k); }},
      {"lexical_index_path", [](RunConfig& c, const json& v, const std::string& k) { c.lexical_index_path = get_string(v, k); }},
      {"merges_path", [](RunConfig& c, const json& v, const std::string& k) { c.merges_path = get_string(v, k); }},
      {"threads", [](RunConfig& c, const json& v, const std::string& k) { c.threads = static_cast<unsigned>(get_count(v, k)); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw UsageError("unknown config key '" + key + "'");
    it->second(cfg, value, key);
  }
  return cfg;
}

RunConfig RunConfig::from_json(const json& j) { return from_json(j, RunConfig{}); }

RunConfig RunConfig::load(const std::filesystem::path& path) { return load(path, RunConfig{}); }

RunConfig RunConfig::load(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, std::move(base));
}

std::string RunConfig::fingerprint() const {
  json j = to_json();
  j.erase("threads");
  return to_hex(fnv1a64(j.dump()));
}

}  // namespace sciret
