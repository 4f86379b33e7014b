#include "sciret/vector_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"

namespace sciret {

VectorStore::VectorStore(std::size_t dim, std::string provider_fingerprint)
    : dim_(dim), provider_fingerprint_(std::move(provider_fingerprint)) {
  if (dim_ == 0) throw DataError("vector store dimension must be positive");
}

void VectorStore::add(std::string_view doc_id, const EmbeddingVector& v) {
  if (v.dim() != dim_) {
    throw DataError("vector for '" + std::string(doc_id) + "' has dimension " +
                    std::to_string(v.dim()) + ", store expects " + std::to_string(dim_));
  }
  if (std::abs(v.norm() - 1.0) > kUnitNormTolerance) {
    throw DataError("vector for '" + std::string(doc_id) + "' is not unit-norm");
  }
  auto [it, inserted] = doc_index_.emplace(std::string(doc_id), doc_ids_.size());
  if (inserted) doc_ids_.emplace_back(doc_id);
  row_doc_.push_back(it->second);
  matrix_.insert(matrix_.end(), v.values.begin(), v.values.end());
}

std::uint64_t VectorStore::fingerprint() const {
  Fingerprinter fp;
  fp.add_u64(dim_).add(provider_fingerprint_).add_u64(row_doc_.size());
  for (std::size_t r = 0; r < row_doc_.size(); ++r) {
    fp.add(doc_ids_[row_doc_[r]]);
    for (float x : row(r)) fp.add_u64(std::bit_cast<std::uint32_t>(x));
  }
  return fp.value();
}

bool VectorStore::operator==(const VectorStore& o) const {
  return dim_ == o.dim_ && provider_fingerprint_ == o.provider_fingerprint_ &&
         doc_ids_ == o.doc_ids_ && row_doc_ == o.row_doc_ && matrix_ == o.matrix_;
}

void VectorStore::save(const std::filesystem::path& path) const {
  EmbeddingTable table;
  table.dim = dim_;
  table.provider_fingerprint = provider_fingerprint_;
  table.values = matrix_;
  table.ids.reserve(row_doc_.size());
  for (std::size_t d : row_doc_) table.ids.push_back(doc_ids_[d]);
  write_embedding_file(path, table);
}

VectorStore VectorStore::load(const std::filesystem::path& path) {
  const EmbeddingTable table = read_embedding_file(path);
  VectorStore store(table.dim, table.provider_fingerprint);
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    const auto r = table.row(i);
    store.add(table.ids[i], EmbeddingVector{std::vector<float>(r.begin(), r.end())});
  }
  return store;
}

VectorStore build_vector_store(const Corpus& corpus, EmbeddingProvider& provider) {
  std::vector<EmbedItem> items;
  items.reserve(corpus.size());
  for (const auto& d : corpus.documents()) items.push_back({d.doc_id, doc_text(d)});
  const auto vectors = provider.embed(items, EmbedRole::document);
  if (vectors.size() != items.size()) {
    throw ProviderError("embedding provider returned " + std::to_string(vectors.size()) +
                        " vectors for " + std::to_string(items.size()) + " documents");
  }
  VectorStore store(provider.dim(), provider.fingerprint());
  for (std::size_t i = 0; i < items.size(); ++i) store.add(items[i].id, vectors[i]);
  return store;
}

std::vector<Candidate> semantic_topk(const VectorStore& store, const EmbeddingVector& query,
                                     std::size_t k) {
  if (query.dim() != store.dim()) {
    throw DataError("query dimension " + std::to_string(query.dim()) +
                    " does not match store dimension " + std::to_string(store.dim()));
  }
  if (k == 0 || store.num_docs() == 0) return {};

  std::vector<double> best(store.num_docs(), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < store.num_rows(); ++r) {
    const double s = dot(store.row(r), query.values);
    auto& slot = best[store.row_doc(r)];
    if (s > slot) slot = s;
  }

  std::vector<std::size_t> order(store.num_docs());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& ids = store.doc_ids();
  const auto better = [&](std::size_t a, std::size_t b) {
    return ranks_before(best[a], ids[a], best[b], ids[b]);
  };
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    better);

  std::vector<Candidate> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    Candidate c;
    c.doc_id = ids[order[i]];
    c.sources = static_cast<unsigned>(Source::semantic);
    c.semantic_rank = i + 1;
    c.semantic_score = best[order[i]];
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sciret
