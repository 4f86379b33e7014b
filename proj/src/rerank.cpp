#include "sciret/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"
#include "sciret/http_client.hpp"

namespace sciret {
namespace {

using json = nlohmann::json;

std::set<std::string> token_set(std::string_view text, const Tokenizer& tokenizer) {
  auto toks = tokenizer.tokenize(text);
  return {std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end())};
}

double overlap_ratio(const std::set<std::string>& q, const std::set<std::string>& d) {
  if (q.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : q) common += d.count(t);
  return static_cast<double>(common) / static_cast<double>(q.size());
}

}  // namespace

RerankerMode parse_reranker_mode(std::string_view name) {
  if (name == "service") return RerankerMode::service;
  if (name == "overlap_stub" || name == "stub") return RerankerMode::overlap_stub;
  throw UsageError("unknown reranker mode '" + std::string(name) + "'");
}

std::string_view to_string(RerankerMode mode) {
  return mode == RerankerMode::service ? "service" : "overlap_stub";
}

void RerankerConfig::validate() const {
  if (mode == RerankerMode::service && endpoint.empty()) {
    throw UsageError("service reranker needs an endpoint");
  }
  if (mode == RerankerMode::overlap_stub && !endpoint.empty()) {
    throw UsageError("overlap_stub reranker takes no endpoint");
  }
  if (batch_size == 0) throw UsageError("reranker batch_size must be >= 1");
  if (max_concurrency == 0) throw UsageError("reranker max_concurrency must be >= 1");
}

double overlap_stub_score(std::string_view query_text, const Document& doc,
                          const Tokenizer& tokenizer) {
  return overlap_ratio(token_set(query_text, tokenizer), token_set(doc_text(doc), tokenizer));
}

double overlap_stub_score(std::string_view query_text, const Document& doc,
                          const BpeVocab& vocab, const NormalizationConfig& cfg) {
  return overlap_stub_score(query_text, doc, Tokenizer::bpe(cfg, vocab));
}

std::vector<double> OverlapStubReranker::score(std::string_view query,
                                               std::span<const Pair> docs) {
  const auto q = token_set(query, tokenizer_);
  std::vector<double> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(overlap_ratio(q, token_set(d.text, tokenizer_)));
  return out;
}

std::string OverlapStubReranker::fingerprint() const {
  return "overlap_stub:" + to_hex(tokenizer_.fingerprint());
}

ServiceReranker::ServiceReranker(std::string endpoint, std::size_t batch_size,
                                 std::size_t max_concurrency)
    : endpoint_(std::move(endpoint)),
      batch_size_(std::max<std::size_t>(1, batch_size)),
      max_concurrency_(std::max<std::size_t>(1, max_concurrency)) {
  const json health = ServiceClient(endpoint_).get("/health");
  if (!health.is_object() || !health.contains("rerank_model_fingerprint") ||
      !health["rerank_model_fingerprint"].is_string()) {
    throw ProviderError("GET /health did not report rerank_model_fingerprint");
  }
  model_fingerprint_ = health["rerank_model_fingerprint"].get<std::string>();
}

std::vector<double> ServiceReranker::score_batch(std::string_view query,
                                                 std::span<const Pair> docs) const {
  json cands = json::array();
  for (const auto& d : docs) cands.push_back({{"id", d.id}, {"text", d.text}});
  const json resp =
      ServiceClient(endpoint_).post("/rerank", json{{"query", query}, {"candidates", cands}});
  if (!resp.is_object() || !resp.contains("scores") || !resp["scores"].is_array()) {
    throw ProviderError("/rerank response lacks 'scores'");
  }
  if (resp.contains("model_fingerprint") && resp["model_fingerprint"].is_string() &&
      resp["model_fingerprint"].get<std::string>() != model_fingerprint_) {
    throw ProviderError("/rerank model fingerprint changed since /health (" + model_fingerprint_ +
                        " -> " + resp["model_fingerprint"].get<std::string>() + ")");
  }
  const auto& scores = resp["scores"];
  if (scores.size() != docs.size()) {
    throw ProviderError("/rerank returned " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(docs.size()) + " candidates");
  }
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : scores) {
    if (!s.is_number()) throw ProviderError("/rerank score is not a number");
    const double v = s.get<double>();
    if (!std::isfinite(v)) throw ProviderError("/rerank returned a non-finite score");
    out.push_back(v);
  }
  return out;
}

std::vector<double> ServiceReranker::score(std::string_view query, std::span<const Pair> docs) {
  std::vector<double> out(docs.size());
  // Batches are issued in waves of max_concurrency; each result is written
  // back at its batch offset so the assembly is position-stable.
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s < docs.size(); s += batch_size_) starts.push_back(s);
  for (std::size_t wave = 0; wave < starts.size(); wave += max_concurrency_) {
    std::vector<std::pair<std::size_t, std::future<std::vector<double>>>> inflight;
    const std::size_t wave_end = std::min(starts.size(), wave + max_concurrency_);
    for (std::size_t b = wave; b < wave_end; ++b) {
      const std::size_t start = starts[b];
      const std::size_t len = std::min(batch_size_, docs.size() - start);
      inflight.emplace_back(start, std::async(std::launch::async, [this, query, docs, start, len] {
                              return score_batch(query, docs.subspan(start, len));
                            }));
    }
    for (auto& [start, fut] : inflight) {
      const auto part = fut.get();
      std::copy(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
    }
  }
  return out;
}

std::unique_ptr<Reranker> make_reranker(const RerankerConfig& cfg, const Tokenizer& tokenizer) {
  cfg.validate();
  if (cfg.mode == RerankerMode::service) {
    return std::make_unique<ServiceReranker>(cfg.endpoint, cfg.batch_size, cfg.max_concurrency);
  }
  return std::make_unique<OverlapStubReranker>(tokenizer);
}

std::vector<ScoredDoc> rerank(Reranker& reranker, std::string_view query_text,
                              const std::vector<Candidate>& candidates, const Corpus& corpus,
                              std::size_t top_n) {
  if (candidates.empty() || top_n == 0) return {};
  std::vector<Reranker::Pair> pairs;
  pairs.reserve(candidates.size());
  for (const auto& c : candidates) pairs.push_back({c.doc_id, doc_text(corpus.by_id(c.doc_id))});

  const auto scores = reranker.score(query_text, pairs);
  if (scores.size() != pairs.size()) {
    throw ProviderError("reranker returned " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(pairs.size()) + " candidates");
  }
  std::vector<ScoredDoc> scored;
  scored.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) scored.push_back({pairs[i].id, scores[i]});
  const std::size_t keep = std::min(top_n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
                      return ranks_before(a, b);
                    });
  scored.resize(keep);
  return scored;
}

}  // namespace sciret
