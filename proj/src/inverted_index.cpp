#include "sciret/inverted_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "sciret/binary_io.hpp"
#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"

namespace sciret {
namespace {

constexpr char kIndexMagic[8] = {'S', 'C', 'I', 'R', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kIndexVersion = 1;

const std::vector<Posting> kNoPostings;

std::vector<std::vector<std::string>> tokenize_all(const Corpus& corpus,
                                                   const Tokenizer& tokenizer,
                                                   unsigned threads) {
  const std::size_t n = corpus.size();
  std::vector<std::vector<std::string>> tokens(n);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  // Each worker owns a contiguous block; output slots are disjoint.
  std::vector<std::thread> pool;
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        tokens[i] = tokenizer.tokenize(doc_text(corpus.at(i)));
      }
    });
  }
  for (auto& th : pool) th.join();
  return tokens;
}

}  // namespace

void Bm25Params::validate() const {
  if (!(k1 >= 0.0) || !std::isfinite(k1)) {
    throw UsageError("BM25 k1 must be finite and >= 0");
  }
  if (!(b >= 0.0 && b <= 1.0)) throw UsageError("BM25 b must lie in [0, 1]");
}

InvertedIndex InvertedIndex::build(const Corpus& corpus, const Tokenizer& tokenizer,
                                   Bm25Params params, unsigned threads) {
  params.validate();
  InvertedIndex index;
  index.params_ = params;
  index.corpus_fingerprint_ = corpus.fingerprint();
  index.tokenizer_fingerprint_ = tokenizer.fingerprint();

  const auto doc_tokens = tokenize_all(corpus, tokenizer, threads);

  std::map<std::string, std::vector<Posting>> by_term;
  std::uint64_t total_len = 0;
  index.doc_ids_.reserve(corpus.size());
  index.doc_len_.reserve(corpus.size());
  for (std::size_t doc = 0; doc < corpus.size(); ++doc) {
    const auto& toks = doc_tokens[doc];
    index.doc_ids_.push_back(corpus.at(doc).doc_id);
    index.doc_len_.push_back(static_cast<std::uint32_t>(toks.size()));
    total_len += toks.size();

    std::map<std::string_view, std::uint32_t> tf;
    for (const auto& t : toks) ++tf[t];
    for (const auto& [term, count] : tf) {
      by_term[std::string(term)].push_back(Posting{static_cast<std::uint32_t>(doc), count});
    }
  }
  index.avgdl_ = static_cast<double>(total_len) / static_cast<double>(corpus.size());

  index.terms_.reserve(by_term.size());
  index.postings_.reserve(by_term.size());
  for (auto& [term, postings] : by_term) {
    index.term_ids_.emplace(term, static_cast<std::uint32_t>(index.terms_.size()));
    index.terms_.push_back(term);
    index.postings_.push_back(std::move(postings));
  }
  return index;
}

std::optional<std::uint32_t> InvertedIndex::term_id(std::string_view term) const {
  const auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

const std::vector<Posting>& InvertedIndex::postings(std::string_view term) const {
  const auto id = term_id(term);
  return id ? postings_[*id] : kNoPostings;
}

std::size_t InvertedIndex::df(std::string_view term) const { return postings(term).size(); }

double InvertedIndex::idf(std::string_view term) const {
  const double n = static_cast<double>(num_docs());
  const double d = static_cast<double>(df(term));
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

namespace {

constexpr int kScoreBits = 40;

double round_score(double x) {
  int exp = 0;
  const double m = std::frexp(x, &exp);
  return std::ldexp(std::round(std::ldexp(m, kScoreBits)), exp - kScoreBits);
}

}  // namespace

double InvertedIndex::term_weight(std::uint32_t tf, std::uint32_t len) const {
  const double f = tf;
  const double norm = 1.0 - params_.b + params_.b * static_cast<double>(len) / avgdl_;
  return f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
}

double InvertedIndex::score(const std::vector<std::string>& query_tokens,
                            std::size_t doc) const {
  if (doc >= num_docs()) {
    throw std::out_of_range("bm25: document position " + std::to_string(doc) +
                            " out of range (N=" + std::to_string(num_docs()) + ")");
  }
  std::vector<double> parts;
  for (const auto& t : query_tokens) {
    const auto& plist = postings(t);
    const auto it = std::lower_bound(
        plist.begin(), plist.end(), doc,
        [](const Posting& p, std::size_t d) { return p.doc < d; });
    if (it == plist.end() || it->doc != doc) continue;
    parts.push_back(idf(t) * term_weight(it->tf, doc_len_[doc]));
  }
  std::sort(parts.begin(), parts.end());
  double total = 0.0;
  for (double x : parts) total += x;
  return round_score(total);
}

// Scores are summed in ascending order and rounded to kScoreBits significant
// bits, so values that agree up to rounding noise compare equal and fall to
// the doc_id tie-break.
std::vector<double> InvertedIndex::score_all(const std::vector<std::string>& query_tokens) const {
  std::vector<std::pair<std::uint32_t, double>> parts;
  for (const auto& t : query_tokens) {
    const auto& plist = postings(t);
    if (plist.empty()) continue;
    const double w = idf(t);
    for (const auto& p : plist) parts.emplace_back(p.doc, w * term_weight(p.tf, doc_len_[p.doc]));
  }
  std::sort(parts.begin(), parts.end());
  std::vector<double> scores(num_docs(), 0.0);
  for (const auto& [doc, x] : parts) scores[doc] += x;
  for (auto& x : scores) x = round_score(x);
  return scores;
}

std::uint64_t InvertedIndex::fingerprint() const {
  Fingerprinter fp;
  fp.add_u64(corpus_fingerprint_).add_u64(tokenizer_fingerprint_);
  fp.add_double(params_.k1).add_double(params_.b).add_double(avgdl_);
  fp.add_u64(doc_ids_.size());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) fp.add(doc_ids_[i]).add_u64(doc_len_[i]);
  fp.add_u64(terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    fp.add(terms_[t]).add_u64(postings_[t].size());
    for (const auto& p : postings_[t]) fp.add_u64((std::uint64_t{p.doc} << 32) | p.tf);
  }
  return fp.value();
}

bool InvertedIndex::operator==(const InvertedIndex& o) const {
  return doc_ids_ == o.doc_ids_ && doc_len_ == o.doc_len_ && avgdl_ == o.avgdl_ &&
         terms_ == o.terms_ && postings_ == o.postings_ && params_ == o.params_ &&
         corpus_fingerprint_ == o.corpus_fingerprint_ &&
         tokenizer_fingerprint_ == o.tokenizer_fingerprint_;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kIndexMagic, sizeof(kIndexMagic));
  binio::write_u32(out, kIndexVersion);
  binio::write_u64(out, corpus_fingerprint_);
  binio::write_u64(out, tokenizer_fingerprint_);
  binio::write_f64(out, params_.k1);
  binio::write_f64(out, params_.b);
  binio::write_u64(out, doc_ids_.size());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    binio::write_str(out, doc_ids_[i]);
    binio::write_u32(out, doc_len_[i]);
  }
  binio::write_f64(out, avgdl_);
  binio::write_u64(out, terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    binio::write_str(out, terms_[t]);
    binio::write_u64(out, postings_[t].size());
    for (const auto& p : postings_[t]) {
      binio::write_u32(out, p.doc);
      binio::write_u32(out, p.tf);
    }
  }
  binio::write_u64(out, fingerprint());
  if (!out) throw DataError("write failed: " + path.string());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[sizeof(kIndexMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kIndexMagic))) {
    throw DataError(path.string() + ": not a lexical index file");
  }
  const auto version = binio::read_u32(in);
  if (version != kIndexVersion) {
    throw DataError(path.string() + ": unsupported index version " + std::to_string(version));
  }
  InvertedIndex index;
  index.corpus_fingerprint_ = binio::read_u64(in);
  index.tokenizer_fingerprint_ = binio::read_u64(in);
  index.params_.k1 = binio::read_f64(in);
  index.params_.b = binio::read_f64(in);
  const auto n = binio::read_u64(in);
  binio::require_available(in, n, 12);
  for (std::uint64_t i = 0; i < n; ++i) {
    index.doc_ids_.push_back(binio::read_str(in));
    index.doc_len_.push_back(binio::read_u32(in));
  }
  index.avgdl_ = binio::read_f64(in);
  const auto num_terms = binio::read_u64(in);
  binio::require_available(in, num_terms, 16);
  for (std::uint64_t t = 0; t < num_terms; ++t) {
    auto term = binio::read_str(in);
    const auto np = binio::read_u64(in);
    binio::require_available(in, np, 8);
    std::vector<Posting> plist;
    plist.reserve(np);
    for (std::uint64_t j = 0; j < np; ++j) {
      Posting p;
      p.doc = binio::read_u32(in);
      p.tf = binio::read_u32(in);
      if (p.doc >= n) throw DataError(path.string() + ": posting beyond document count");
      plist.push_back(p);
    }
    index.term_ids_.emplace(term, static_cast<std::uint32_t>(index.terms_.size()));
    index.terms_.push_back(std::move(term));
    index.postings_.push_back(std::move(plist));
  }
  const auto stored = binio::read_u64(in);
  if (stored != index.fingerprint()) {
    throw DataError(path.string() + ": index checksum mismatch");
  }
  return index;
}

double bm25_score(const InvertedIndex& index, const std::vector<std::string>& query_tokens,
                  std::size_t doc) {
  return index.score(query_tokens, doc);
}

std::vector<Candidate> lexical_topk_tokens(const InvertedIndex& index,
                                           const std::vector<std::string>& query_tokens,
                                           std::size_t k) {
  if (k == 0 || query_tokens.empty()) return {};
  const auto scores = index.score_all(query_tokens);
  std::vector<std::size_t> hits;
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (scores[d] > 0.0) hits.push_back(d);
  }
  const auto better = [&](std::size_t a, std::size_t b) {
    return ranks_before(scores[a], index.doc_id(a), scores[b], index.doc_id(b));
  };
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    better);
  hits.resize(keep);

  std::vector<Candidate> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    Candidate c;
    c.doc_id = index.doc_id(hits[i]);
    c.sources = static_cast<unsigned>(Source::lexical);
    c.lexical_rank = i + 1;
    c.lexical_score = scores[hits[i]];
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> lexical_topk(const InvertedIndex& index, const Tokenizer& tokenizer,
                                    std::string_view query, std::size_t k) {
  if (k == 0) return {};
  return lexical_topk_tokens(index, tokenizer.tokenize(query), k);
}

}  // namespace sciret
