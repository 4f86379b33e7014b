#include "sciret/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "sciret/errors.hpp"
#include "sciret/fusion.hpp"
#include "sciret/hashing.hpp"
#include "sciret/http_client.hpp"
#include "sciret/log.hpp"

namespace sciret {
namespace {

constexpr std::size_t kDefaultHashDim = 256;

std::string or_env(const std::string& endpoint) {
  return endpoint.empty() ? endpoint_from_env() : endpoint;
}

std::string tokenizer_key(const RunConfig& cfg) {
  return to_hex(Fingerprinter()
                    .add_u64(cfg.normalization.fingerprint())
                    .add(to_string(cfg.tokenizer))
                    .add_u64(cfg.tokenizer == TokenizerKind::bpe ? cfg.vocab_size : 0)
                    .add(cfg.merges_path.string())
                    .value());
}

std::string index_key(const RunConfig& cfg) {
  return to_hex(Fingerprinter()
                    .add(tokenizer_key(cfg))
                    .add_double(cfg.bm25.k1)
                    .add_double(cfg.bm25.b)
                    .add(cfg.lexical_index_path.string())
                    .value());
}

std::string store_key(const RunConfig& cfg) {
  Fingerprinter fp;
  fp.add(to_string(cfg.embedding))
      .add(or_env(cfg.embedding_endpoint))
      .add_u64(cfg.embedding_dim)
      .add(cfg.embeddings_path.string())
      .add_u64(cfg.additional_documents);
  if (cfg.embedding == EmbeddingMode::hash_test) fp.add(tokenizer_key(cfg));
  if (cfg.additional_documents) {
    fp.add(to_string(cfg.generator))
        .add(or_env(cfg.generator_endpoint))
        .add(cfg.generator_fixture.string());
  }
  return to_hex(fp.value());
}

std::vector<ScoredDoc> as_scored(const std::vector<Candidate>& ranked) {
  std::vector<ScoredDoc> out;
  out.reserve(ranked.size());
  for (const auto& c : ranked) out.push_back({c.doc_id, c.branch_score()});
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& cfg, const Tokenizer& tokenizer,
                                                 const std::filesystem::path& file) {
  switch (cfg.embedding) {
    case EmbeddingMode::hash_test:
      return std::make_unique<HashEmbedder>(
          tokenizer, cfg.embedding_dim == 0 ? kDefaultHashDim : cfg.embedding_dim);
    case EmbeddingMode::file:
      return std::make_unique<FileEmbedder>(file, cfg.embedding_dim);
    case EmbeddingMode::service: {
      if (cfg.embedding_dim == 0) {
        throw UsageError("embedding provider 'service' needs embedding_dim");
      }
      return std::make_unique<ServiceEmbedder>(or_env(cfg.embedding_endpoint), cfg.embedding_dim,
                                               cfg.embedding_batch_size);
    }
  }
  throw UsageError("unknown embedding provider");
}

}  // namespace

Tokenizer build_tokenizer(const RunConfig& cfg, const Corpus& corpus) {
  if (cfg.tokenizer == TokenizerKind::whitespace) {
    return Tokenizer::whitespace(cfg.normalization);
  }
  if (!cfg.merges_path.empty()) {
    return Tokenizer::bpe(cfg.normalization, load_merges(cfg.merges_path));
  }
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& d : corpus.documents()) {
    texts.push_back(normalize_text(doc_text(d), cfg.normalization));
  }
  return Tokenizer::bpe(cfg.normalization, train_bpe(texts, cfg.vocab_size));
}

void add_augmented_rows(VectorStore& store, const Corpus& corpus, EmbeddingProvider& provider,
                        TextGenerator& gen) {
  std::vector<EmbedItem> items;
  std::vector<std::string> owners;
  items.reserve(corpus.size() * 2);
  for (const auto& d : corpus.documents()) {
    auto aug = augment_corpus(gen, d);
    items.push_back({d.doc_id + std::string(kSummaryIdSuffix), std::move(aug.summary)});
    items.push_back({d.doc_id + std::string(kTweetIdSuffix), std::move(aug.synthetic_tweet)});
    owners.push_back(d.doc_id);
    owners.push_back(d.doc_id);
  }
  const auto vectors = provider.embed(items, EmbedRole::document);
  if (vectors.size() != items.size()) {
    throw ProviderError("embedding provider returned the wrong number of vectors");
  }
  for (std::size_t i = 0; i < items.size(); ++i) store.add(owners[i], vectors[i]);
}

std::shared_ptr<const Tokenizer> ResourceCache::tokenizer(const RunConfig& cfg,
                                                          const Corpus& corpus) {
  const auto key = tokenizer_key(cfg);
  {
    std::lock_guard lock(mutex_);
    if (auto it = tokenizers_.find(key); it != tokenizers_.end()) return it->second;
  }
  auto built = std::make_shared<const Tokenizer>(build_tokenizer(cfg, corpus));
  std::lock_guard lock(mutex_);
  return tokenizers_.emplace(key, std::move(built)).first->second;
}

std::shared_ptr<const InvertedIndex> ResourceCache::index(const RunConfig& cfg,
                                                          const Corpus& corpus,
                                                          const Tokenizer& tokenizer) {
  const auto key = index_key(cfg);
  {
    std::lock_guard lock(mutex_);
    if (auto it = indexes_.find(key); it != indexes_.end()) return it->second;
  }
  std::shared_ptr<const InvertedIndex> built;
  if (!cfg.lexical_index_path.empty()) {
    auto loaded = InvertedIndex::load(cfg.lexical_index_path);
    if (loaded.corpus_fingerprint() != corpus.fingerprint()) {
      throw DataError(cfg.lexical_index_path.string() + " was built from a different corpus");
    }
    if (loaded.tokenizer_fingerprint() != tokenizer.fingerprint()) {
      throw DataError(cfg.lexical_index_path.string() +
                      " was built with a different tokenizer or normalization");
    }
    built = std::make_shared<const InvertedIndex>(std::move(loaded));
  } else {
    built = std::make_shared<const InvertedIndex>(
        InvertedIndex::build(corpus, tokenizer, cfg.bm25, cfg.threads));
  }
  std::lock_guard lock(mutex_);
  return indexes_.emplace(key, std::move(built)).first->second;
}

std::shared_ptr<const VectorStore> ResourceCache::store(const RunConfig& cfg,
                                                        const Corpus& corpus,
                                                        const Tokenizer&,
                                                        EmbeddingProvider& provider,
                                                        TextGenerator* gen) {
  const auto key = store_key(cfg);
  {
    std::lock_guard lock(mutex_);
    if (auto it = stores_.find(key); it != stores_.end()) return it->second;
  }
  VectorStore store = build_vector_store(corpus, provider);
  if (cfg.additional_documents) {
    if (gen == nullptr) throw UsageError("additional_documents needs a generator");
    add_augmented_rows(store, corpus, provider, *gen);
  }
  auto built = std::make_shared<const VectorStore>(std::move(store));
  std::lock_guard lock(mutex_);
  return stores_.emplace(key, std::move(built)).first->second;
}

Pipeline::Pipeline(RunConfig cfg, const Corpus& corpus, ResourceCache* cache)
    : cfg_(std::move(cfg)), corpus_(corpus) {
  cfg_.validate();
  ResourceCache local;
  ResourceCache& res = cache ? *cache : local;

  if (cfg_.needs_generator()) {
    GenerationProviderConfig gen_cfg;
    gen_cfg.mode = cfg_.generator;
    if (gen_cfg.mode == GenerationMode::service) {
      gen_cfg.endpoint = or_env(cfg_.generator_endpoint);
    } else {
      gen_cfg.fixture_path = cfg_.generator_fixture;
    }
    generator_ = make_generator(gen_cfg);
  }

  tokenizer_ = res.tokenizer(cfg_, corpus_);
  if (uses_lexical()) index_ = res.index(cfg_, corpus_, *tokenizer_);
  if (uses_semantic()) {
    doc_embedder_ = make_provider(cfg_, *tokenizer_, cfg_.embeddings_path);
    if (cfg_.embedding == EmbeddingMode::file) {
      query_embedder_ = make_provider(cfg_, *tokenizer_, cfg_.query_embeddings_path);
    }
    store_ = res.store(cfg_, corpus_, *tokenizer_, *doc_embedder_, generator_.get());
  }
  if (cfg_.fusion == FusionMode::rerank) {
    RerankerConfig rc = cfg_.reranker;
    if (rc.mode == RerankerMode::service) rc.endpoint = or_env(rc.endpoint);
    reranker_ = make_reranker(rc, *tokenizer_);
  }
}

bool Pipeline::uses_lexical() const { return cfg_.fusion != FusionMode::semantic_only; }
bool Pipeline::uses_semantic() const { return cfg_.fusion != FusionMode::lexical_only; }

EmbeddingVector Pipeline::query_vector(const Query& q) const {
  EmbeddingProvider& provider = query_embedder_ ? *query_embedder_ : *doc_embedder_;
  std::vector<EmbedItem> item;
  EmbedRole role = EmbedRole::query;
  if (cfg_.hyde) {
    item.push_back({q.query_id + std::string(kHydeIdSuffix), hyde_document(*generator_, q.text).text()});
    role = EmbedRole::document;
  } else {
    item.push_back({q.query_id, q.text});
  }
  auto vecs = provider.embed(item, role);
  if (vecs.size() != 1) throw ProviderError("embedding provider returned no query vector");
  return std::move(vecs.front());
}

QueryResult Pipeline::run_query(const Query& q) const {
  QueryResult r;
  r.query_id = q.query_id;

  std::vector<Candidate> lex;
  std::vector<Candidate> sem;
  if (uses_lexical()) {
    std::string lexical_query = q.text;
    if (cfg_.query_augmentation == QueryAugmentation::rewrite) {
      lexical_query = rewrite_query(*generator_, q.text);
    } else if (cfg_.query_augmentation == QueryAugmentation::expand) {
      lexical_query = expand_query(*generator_, q.text);
    }
    const std::size_t k = cfg_.fusion == FusionMode::lexical_only ? cfg_.eval_depth : cfg_.lex_k;
    lex = lexical_topk(*index_, *tokenizer_, lexical_query, k);
    r.lexical_ids = ids_of(lex);
  }
  if (uses_semantic()) {
    const std::size_t k = cfg_.fusion == FusionMode::semantic_only ? cfg_.eval_depth : cfg_.sem_k;
    sem = semantic_topk(*store_, query_vector(q), k);
    r.semantic_ids = ids_of(sem);
  }

  switch (cfg_.fusion) {
    case FusionMode::lexical_only:
      r.ranking = as_scored(lex);
      break;
    case FusionMode::semantic_only:
      r.ranking = as_scored(sem);
      break;
    case FusionMode::rrf: {
      r.candidate_ids = ids_of(merge_candidates(lex, sem));
      r.ranking = rrf_fuse({r.lexical_ids, r.semantic_ids}, cfg_.rrf);
      break;
    }
    case FusionMode::rerank: {
      const auto merged = merge_candidates(lex, sem);
      r.candidate_ids = ids_of(merged);
      r.ranking = rerank(*reranker_, q.text, merged, corpus_, cfg_.top_n);
      break;
    }
  }
  return r;
}

PipelineOutput Pipeline::run(const QuerySet& queries) const {
  const std::size_t n = queries.queries.size();
  PipelineOutput out;
  out.results.resize(n);
  std::vector<std::exception_ptr> errors(n);

  unsigned threads = cfg_.threads == 0 ? std::max(1U, std::thread::hardware_concurrency())
                                       : cfg_.threads;
  threads = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= n) break;
      try {
        out.results[i] = run_query(queries.queries[i]);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const std::string prefix = "query '" + queries.queries[i].query_id + "': ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw_error(e.code(), prefix + e.what());
    } catch (const std::exception& e) {
      throw DataError(prefix + e.what());
    }
  }

  if (queries.has_gold) out.report = evaluate(queries, out.results);
  return out;
}

EvalReport Pipeline::evaluate(const QuerySet& queries,
                              const std::vector<QueryResult>& results) const {
  if (!queries.has_gold) {
    throw DataError("query set has no gold document ids; cannot evaluate");
  }
  if (results.size() != queries.queries.size()) {
    throw DataError("result count does not match query count");
  }
  std::vector<std::string> ids;
  std::vector<RankedIds> rankings, lexical, semantic, candidates;
  std::vector<std::optional<std::string>> golds;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& q = queries.queries[i];
    if (!corpus_.contains(*q.gold_doc_id)) {
      throw DataError("query '" + q.query_id + "': gold id '" + *q.gold_doc_id +
                      "' is not in the corpus");
    }
    ids.push_back(q.query_id);
    golds.push_back(q.gold_doc_id);
    rankings.push_back(ids_of(results[i].ranking));
    lexical.push_back(results[i].lexical_ids);
    semantic.push_back(results[i].semantic_ids);
    candidates.push_back(results[i].candidate_ids);
  }

  EvalReport report = evaluate_rankings(ids, rankings, golds);
  // Nominal list length, so that small corpora do not hide cutoffs the
  // configuration would fill on a larger one.
  switch (cfg_.fusion) {
    case FusionMode::lexical_only:
    case FusionMode::semantic_only:
      report.depth = cfg_.eval_depth;
      break;
    case FusionMode::rrf:
      report.depth = std::min(cfg_.lex_k, cfg_.rrf.window) + std::min(cfg_.sem_k, cfg_.rrf.window);
      break;
    case FusionMode::rerank:
      report.depth = cfg_.top_n;
      break;
  }
  report.label = std::string(to_string(cfg_.fusion));
  report.config_fingerprint = cfg_.fingerprint();
  if (uses_lexical()) {
    const std::size_t k = cfg_.fusion == FusionMode::lexical_only ? cfg_.eval_depth : cfg_.lex_k;
    report.lexical_k = k;
    report.lexical_success = success_at_k(lexical, golds, k);
  }
  if (uses_semantic()) {
    const std::size_t k = cfg_.fusion == FusionMode::semantic_only ? cfg_.eval_depth : cfg_.sem_k;
    report.semantic_k = k;
    report.semantic_success = success_at_k(semantic, golds, k);
  }
  if (cfg_.fusion == FusionMode::rerank || cfg_.fusion == FusionMode::rrf) {
    report.candidate_count = cfg_.lex_k + cfg_.sem_k;
    report.candidate_recall = success_at_k(candidates, golds, *report.candidate_count);
  }
  return report;
}

PipelineOutput run_pipeline(const RunConfig& cfg, const Corpus& corpus, const QuerySet& queries) {
  return Pipeline(cfg, corpus).run(queries);
}

std::vector<EvalReport> run_ablation(const std::vector<AblationRow>& grid, const Corpus& corpus,
                                     const QuerySet& queries) {
  if (!queries.has_gold) {
    throw DataError("query set has no gold document ids; cannot run an ablation");
  }
  ResourceCache cache;
  std::vector<EvalReport> reports;
  reports.reserve(grid.size());
  for (const auto& row : grid) {
    log_info("ablation: " + row.label);
    Pipeline pipeline(row.config, corpus, &cache);
    auto out = pipeline.run(queries);
    out.report->label = row.label;
    reports.push_back(std::move(*out.report));
  }
  return reports;
}

std::vector<AblationRow> default_ablation_grid(const RunConfig& base) {
  std::vector<AblationRow> grid;
  for (FusionMode mode : {FusionMode::lexical_only, FusionMode::semantic_only, FusionMode::rrf,
                          FusionMode::rerank}) {
    RunConfig cfg = base;
    cfg.fusion = mode;
    grid.push_back({std::string(to_string(mode)), cfg});
  }
  return grid;
}

}  // namespace sciret
