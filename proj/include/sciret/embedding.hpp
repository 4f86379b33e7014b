#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sciret/tokenizer.hpp"

namespace sciret {

inline constexpr double kUnitNormTolerance = 1e-6;
/// Provider vectors further than this from unit norm are rejected outright.
inline constexpr double kRenormalizeLimit = 1e-3;

/// Unit-norm dense vector.
struct EmbeddingVector {
  std::vector<float> values;

  std::size_t dim() const { return values.size(); }
  double norm() const;
  bool operator==(const EmbeddingVector&) const = default;
};

/// Double-accumulated dot product. Sizes must match.
double dot(std::span<const float> a, std::span<const float> b);

/// L2-normalizes `raw`. The zero vector maps to the unit vector along
/// axis 0.
EmbeddingVector unit_vector(std::span<const double> raw);

/// Validates a vector returned by a provider: dimension, finiteness and
/// norm. Deviations up to kRenormalizeLimit are renormalized with a
/// warning; anything else throws ProviderError mentioning `context`.
EmbeddingVector accept_provider_vector(std::span<const double> raw, std::size_t expected_dim,
                                       std::string_view context);

enum class EmbedRole { query, document };
std::string_view to_string(EmbedRole role);

/// What to embed. File-backed providers look vectors up by id; the others
/// embed the text.
struct EmbedItem {
  std::string id;
  std::string text;
};

enum class EmbeddingMode { service, file, hash_test };
EmbeddingMode parse_embedding_mode(std::string_view name);
std::string_view to_string(EmbeddingMode mode);

struct EmbeddingProviderConfig {
  EmbeddingMode mode = EmbeddingMode::hash_test;
  std::string endpoint;
  std::filesystem::path path;
  std::size_t dim = 256;
  std::size_t batch_size = 32;

  /// Exactly the active mode's parameters may be set.
  void validate() const;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// One unit-norm vector per item, in input order.
  virtual std::vector<EmbeddingVector> embed(std::span<const EmbedItem> items,
                                             EmbedRole role) = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string fingerprint() const = 0;
};

/// Token-count hashing into `dim` buckets, L2-normalized. Deterministic
/// offline stand-in for a neural encoder.
EmbeddingVector hash_embed(std::string_view text, std::size_t dim, const Tokenizer& tokenizer);
EmbeddingVector hash_embed(std::string_view text, std::size_t dim, const BpeVocab& vocab,
                           const NormalizationConfig& cfg);

class HashEmbedder final : public EmbeddingProvider {
 public:
  HashEmbedder(Tokenizer tokenizer, std::size_t dim);

  std::vector<EmbeddingVector> embed(std::span<const EmbedItem> items, EmbedRole role) override;
  std::size_t dim() const override { return dim_; }
  std::string fingerprint() const override;

 private:
  Tokenizer tokenizer_;
  std::size_t dim_;
};

/// POST /embed {texts, role} -> {vectors, dim, model_fingerprint}.
class ServiceEmbedder final : public EmbeddingProvider {
 public:
  ServiceEmbedder(std::string endpoint, std::size_t dim, std::size_t batch_size = 32);

  std::vector<EmbeddingVector> embed(std::span<const EmbedItem> items, EmbedRole role) override;
  std::size_t dim() const override { return dim_; }
  /// Model fingerprint from GET /health. A response reporting a different
  /// checkpoint is rejected.
  std::string fingerprint() const override;

 private:
  std::string endpoint_;
  std::size_t dim_;
  std::size_t batch_size_;
  std::string model_fingerprint_;
};

/// Rows of the precomputed-embedding file. Layout (little-endian):
///   magic "SCIREMB\0", u32 version, u32 dim, u64 count,
///   u64-prefixed provider fingerprint,
///   count x { u64-prefixed doc id, dim x f32 }.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::string provider_fingerprint;
  std::vector<std::string> ids;
  std::vector<float> values;  // row-major, ids.size() x dim

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
};

void write_embedding_file(const std::filesystem::path& path, const EmbeddingTable& table);
EmbeddingTable read_embedding_file(const std::filesystem::path& path);

/// Looks vectors up by id in a precomputed file.
class FileEmbedder final : public EmbeddingProvider {
 public:
  /// Throws DataError on duplicate ids or a dimension other than `expected_dim`
  /// (0 accepts whatever the file declares).
  explicit FileEmbedder(const std::filesystem::path& path, std::size_t expected_dim = 0);

  std::vector<EmbeddingVector> embed(std::span<const EmbedItem> items, EmbedRole role) override;
  std::size_t dim() const override { return table_.dim; }
  std::string fingerprint() const override { return table_.provider_fingerprint; }
  bool contains(std::string_view id) const { return rows_.count(std::string(id)) != 0; }

 private:
  std::filesystem::path path_;
  EmbeddingTable table_;
  std::unordered_map<std::string, std::size_t> rows_;
};

/// Builds the provider described by `cfg`. `tokenizer` feeds hash_test mode.
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& cfg,
                                                           const Tokenizer& tokenizer);

/// Convenience: embed plain texts with ids "0", "1", ...
std::vector<EmbeddingVector> embed(EmbeddingProvider& provider,
                                   const std::vector<std::string>& texts, EmbedRole role);

}  // namespace sciret
