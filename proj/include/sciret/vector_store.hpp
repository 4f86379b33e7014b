#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sciret/candidate.hpp"
#include "sciret/corpus.hpp"
#include "sciret/embedding.hpp"

namespace sciret {

/// Flat matrix of unit-norm rows for exact inner-product search. Each row
/// belongs to one document; augmented variants add further rows for a
/// document that is already present.
class VectorStore {
 public:
  VectorStore(std::size_t dim, std::string provider_fingerprint);

  /// Appends a row for `doc_id`. Throws DataError on dimension mismatch or
  /// a row that is not unit-norm within kUnitNormTolerance.
  void add(std::string_view doc_id, const EmbeddingVector& v);

  std::size_t dim() const { return dim_; }
  std::size_t num_docs() const { return doc_ids_.size(); }
  std::size_t num_rows() const { return row_doc_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  std::span<const float> row(std::size_t r) const {
    return std::span<const float>(matrix_).subspan(r * dim_, dim_);
  }
  std::size_t row_doc(std::size_t r) const { return row_doc_.at(r); }
  const std::string& provider_fingerprint() const { return provider_fingerprint_; }
  std::uint64_t fingerprint() const;

  /// Persists in the precomputed-embedding file format (one record per row).
  void save(const std::filesystem::path& path) const;
  static VectorStore load(const std::filesystem::path& path);

  bool operator==(const VectorStore& other) const;

 private:
  std::size_t dim_;
  std::string provider_fingerprint_;
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, std::size_t> doc_index_;
  std::vector<std::size_t> row_doc_;
  std::vector<float> matrix_;
};

/// One row per document embedding doc_text(d) with role=document, no
/// chunking. Items carry the doc id so file-backed providers can look them up.
VectorStore build_vector_store(const Corpus& corpus, EmbeddingProvider& provider);

/// Exact scan. Per document the best-scoring row counts; min(k, docs)
/// candidates by dot product descending, doc_id ascending on ties.
/// Throws DataError when the query dimension differs from the store's.
std::vector<Candidate> semantic_topk(const VectorStore& store, const EmbeddingVector& query,
                                     std::size_t k = 100);

}  // namespace sciret
